#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "spamfilter/features.hpp"

using namespace spamfilter;

namespace {

Corpus make_corpus(const std::vector<std::pair<std::vector<std::string>, Label>>& docs) {
  std::vector<Document> out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "d%03zu", i);
    out.push_back({docs[i].first, docs[i].second, id});
  }
  return Corpus(std::move(out));
}

// Small random corpora over a vocabulary of at most 20 tokens.
Corpus random_corpus(std::mt19937& rng) {
  std::uniform_int_distribution<int> vocab_size(2, 20), n_docs(2, 40), length(0, 8);
  const int vocab = vocab_size(rng);
  std::uniform_int_distribution<int> word(0, vocab - 1);
  std::vector<std::pair<std::vector<std::string>, Label>> docs;
  const int n = n_docs(rng);
  for (int d = 0; d < n; ++d) {
    std::vector<std::string> tokens;
    for (int t = length(rng); t > 0; --t) tokens.push_back("w" + std::to_string(word(rng)));
    docs.push_back({tokens, d % 2 == 0 || rng() % 3 == 0 ? Label::legitimate : Label::spam});
  }
  return make_corpus(docs);
}

Corpus swap_labels(const Corpus& corpus) {
  std::vector<Document> docs = corpus.documents();
  for (auto& doc : docs) doc.label = doc.label == Label::spam ? Label::legitimate : Label::spam;
  return Corpus(std::move(docs));
}

}  // namespace

TEST(TokenClassCounts, DocumentPresence) {
  const auto corpus = make_corpus({{{"free", "free", "cash"}, Label::spam},
                                   {{"free"}, Label::spam},
                                   {{"syntax"}, Label::legitimate},
                                   {{"syntax", "free"}, Label::legitimate}});
  const auto stats = token_class_counts(corpus);
  EXPECT_EQ(stats.tokens, (std::vector<std::string>{"cash", "free", "syntax"}));
  EXPECT_EQ(stats.counts[1], (TokenCounts{2, 1}));  // "free" twice in one doc counts once
  EXPECT_EQ(stats.counts[0], (TokenCounts{1, 0}));
  EXPECT_EQ(stats.n_spam, 2U);
  EXPECT_EQ(stats.n_legit, 2U);
}

TEST(TokenClassCounts, CashOnlyInSpam) {
  const auto corpus = make_corpus({{{"cash"}, Label::spam},
                                   {{"cash", "now"}, Label::spam},
                                   {{"now"}, Label::legitimate},
                                   {{"paper"}, Label::legitimate}});
  const auto stats = token_class_counts(corpus);
  EXPECT_EQ(stats.counts[0], (TokenCounts{2, 0}));
}

TEST(MutualInformation, Examples) {
  // Present in half of each class: independent of the class.
  EXPECT_NEAR(mutual_information({1, 2}, 2, 4), 0.0, 1e-15);
  // N=4, token in both spam docs and no legitimate doc: one full bit.
  EXPECT_NEAR(mutual_information({2, 0}, 2, 2), 1.0, 1e-15);
  // Present everywhere.
  EXPECT_NEAR(mutual_information({5, 7}, 5, 7), 0.0, 1e-15);
}

TEST(MutualInformation, MatchesBruteForceOnSmallCorpora) {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const auto corpus = random_corpus(rng);
    const auto expected = oracle::mutual_information(corpus);
    const auto stats = token_class_counts(corpus);
    ASSERT_EQ(stats.size(), expected.size());
    for (std::size_t i = 0; i < stats.size(); ++i) {
      const double mi = mutual_information(stats.counts[i], stats.n_spam, stats.n_legit);
      EXPECT_NEAR(mi, expected.at(stats.tokens[i]), 1e-12);
      EXPECT_GE(mi, -1e-12);
    }
  }
}

TEST(MutualInformation, InvariantUnderClassRelabeling) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto corpus = random_corpus(rng);
    const auto a = token_class_counts(corpus);
    const auto b = token_class_counts(swap_labels(corpus));
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(mutual_information(a.counts[i], a.n_spam, a.n_legit),
                  mutual_information(b.counts[i], b.n_spam, b.n_legit), 1e-12);
    }
  }
}

TEST(SelectAttributes, SortsByScoreThenToken) {
  // a: independent (0), b: perfect separator (1 bit), c: weak.
  TokenStats stats;
  stats.tokens = {"a", "b", "c"};
  stats.counts = {{1, 1}, {2, 0}, {1, 0}};
  stats.n_spam = 2;
  stats.n_legit = 2;
  const auto top2 = select_attributes(stats, 2);
  EXPECT_EQ(top2.tokens, (std::vector<std::string>{"b", "c"}));
  EXPECT_TRUE(std::is_sorted(top2.scores.rbegin(), top2.scores.rend()));

  TokenStats tied;
  tied.tokens = {"a", "b"};
  tied.counts = {{2, 0}, {2, 0}};
  tied.n_spam = 2;
  tied.n_legit = 2;
  EXPECT_EQ(select_attributes(tied, 1).tokens, (std::vector<std::string>{"a"}));
}

TEST(SelectAttributes, Errors) {
  TokenStats stats;
  stats.tokens = {"a"};
  stats.counts = {{1, 0}};
  stats.n_spam = 1;
  stats.n_legit = 1;
  EXPECT_THROW(select_attributes(stats, 0), Error);
  try {
    select_attributes(stats, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("only 1 distinct"), std::string::npos);
  }
}

TEST(SelectAttributes, SmallerSelectionIsPrefixOfLarger) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const auto stats = token_class_counts(random_corpus(rng));
    for (std::size_t m1 = 1; m1 <= stats.size(); ++m1) {
      const auto small = select_attributes(stats, m1);
      const auto large = select_attributes(stats, stats.size());
      ASSERT_EQ(small, large.prefix(m1));
    }
  }
}

TEST(SelectAttributes, HundredFromFixture) {
  const auto corpus = generate_fixture_corpus(5, 200, 40);
  const auto attributes = select_attributes(token_class_counts(corpus), 100);
  EXPECT_EQ(attributes.size(), 100U);
}

TEST(Vectorize, Examples) {
  const AttributeSet attributes{{"free", "earn"}, {0.5, 0.4}};
  EXPECT_EQ(vectorize({{"free", "cash"}, Label::spam, "x"}, attributes), (BinaryVector{1, 0}));
  EXPECT_EQ(vectorize({{}, Label::spam, "x"}, attributes), (BinaryVector{0, 0}));
  EXPECT_EQ(vectorize({{"earn", "x", "free"}, Label::spam, "x"}, attributes), (BinaryVector{1, 1}));
}

TEST(BinaryVector, PrefixMasksHighBits) {
  BinaryVector v(130);
  for (std::size_t i = 0; i < 130; i += 3) v.set(i);
  const auto p = v.prefix(70);
  EXPECT_EQ(p.size(), 70U);
  for (std::size_t i = 0; i < 70; ++i) EXPECT_EQ(p[i], v[i]);
  EXPECT_EQ(p.count(), 24U);
  BinaryVector direct(70);
  for (std::size_t i = 0; i < 70; i += 3) direct.set(i);
  EXPECT_EQ(p, direct);
}

TEST(AttributeFile, WritesRankOrderWithSixDecimals) {
  const AttributeSet attributes{{"free", "earn"}, {1.0, 0.1234567}};
  std::ostringstream out;
  write_attributes(out, attributes);
  EXPECT_EQ(out.str(), "free\t1.000000\nearn\t0.123457\n");
  std::istringstream in(out.str());
  const auto back = read_attributes(in);
  EXPECT_EQ(back.tokens, attributes.tokens);
  EXPECT_NEAR(back.scores[1], 0.123457, 1e-12);
}
