#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "spamfilter/corpus.hpp"
#include "spamfilter/error.hpp"

namespace spamfilter {

// Fixed-length bit vector, packed into 64-bit words so that overlap
// distances reduce to popcounts. Unused high bits of the last word are zero.
class BinaryVector {
 public:
  BinaryVector() = default;
  explicit BinaryVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  BinaryVector(std::initializer_list<int> bits) : BinaryVector(bits.size()) {
    std::size_t i = 0;
    for (int bit : bits) set(i++, bit != 0);
  }

  std::size_t size() const noexcept { return size_; }

  bool operator[](std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }

  void set(std::size_t i, bool value = true) {
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    if (value) {
      words_[i / 64] |= mask;
    } else {
      words_[i / 64] &= ~mask;
    }
  }

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  // First `m` bits, for attribute sets that are prefixes of a longer ranking.
  BinaryVector prefix(std::size_t m) const {
    BinaryVector out(std::min(m, size_));
    std::copy_n(words_.begin(), out.words_.size(), out.words_.begin());
    if (out.size_ % 64 != 0 && !out.words_.empty()) {
      out.words_.back() &= (std::uint64_t{1} << (out.size_ % 64)) - 1;
    }
    return out;
  }

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  bool operator==(const BinaryVector&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct LabeledVector {
  BinaryVector vector;
  Label label = Label::legitimate;
};

struct TokenCounts {
  std::size_t spam = 0;   // spam documents containing the token
  std::size_t legit = 0;  // legitimate documents containing the token

  bool operator==(const TokenCounts&) const = default;
};

// Document-level presence counts, tokens in ascending lexicographic order.
struct TokenStats {
  std::vector<std::string> tokens;
  std::vector<TokenCounts> counts;
  std::size_t n_spam = 0;
  std::size_t n_legit = 0;

  std::size_t size() const noexcept { return tokens.size(); }
};

// Counts over the documents selected by `indices`; cross-validation passes
// the training folds only.
inline TokenStats token_class_counts(const Corpus& corpus,
                                     std::span<const std::size_t> indices) {
  std::unordered_map<std::string_view, TokenCounts> table;
  TokenStats stats;
  std::vector<std::string_view> distinct;
  for (const std::size_t index : indices) {
    const Document& doc = corpus[index];
    const bool spam = doc.label == Label::spam;
    (spam ? stats.n_spam : stats.n_legit) += 1;
    distinct.assign(doc.tokens.begin(), doc.tokens.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (const auto token : distinct) {
      auto& counts = table[token];
      (spam ? counts.spam : counts.legit) += 1;
    }
  }
  std::vector<std::pair<std::string_view, TokenCounts>> sorted(table.begin(), table.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  stats.tokens.reserve(sorted.size());
  stats.counts.reserve(sorted.size());
  for (const auto& [token, counts] : sorted) {
    stats.tokens.emplace_back(token);
    stats.counts.push_back(counts);
  }
  return stats;
}

inline TokenStats token_class_counts(const Corpus& corpus) {
  if (corpus.empty()) fail(ErrorKind::input, "empty corpus");
  std::vector<std::size_t> all(corpus.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return token_class_counts(corpus, all);
}

// Mutual information (bits) between a binary attribute and the class, with
// probabilities estimated as frequency ratios and 0 * log 0 taken as 0.
inline double mutual_information(const TokenCounts& present, std::size_t n_spam,
                                 std::size_t n_legit) {
  const double total = static_cast<double>(n_spam + n_legit);
  if (total == 0) return 0.0;
  // joint[x][c]: x = attribute value, c = 0 legit / 1 spam
  const double joint[2][2] = {
      {static_cast<double>(n_legit - present.legit), static_cast<double>(n_spam - present.spam)},
      {static_cast<double>(present.legit), static_cast<double>(present.spam)},
  };
  const double class_total[2] = {static_cast<double>(n_legit), static_cast<double>(n_spam)};
  double mi = 0.0;
  for (int x = 0; x < 2; ++x) {
    const double x_total = joint[x][0] + joint[x][1];
    for (int c = 0; c < 2; ++c) {
      if (joint[x][c] == 0) continue;
      // P(x,c) / (P(x) P(c)) = n(x,c) N / (n(x) n(c))
      mi += joint[x][c] / total * std::log2(joint[x][c] * total / (x_total * class_total[c]));
    }
  }
  return std::max(mi, 0.0);
}

struct AttributeSet {
  std::vector<std::string> tokens;
  std::vector<double> scores;

  std::size_t size() const noexcept { return tokens.size(); }

  AttributeSet prefix(std::size_t m) const {
    const std::size_t n = std::min(m, size());
    return {{tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(n)},
            {scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(n)}};
  }

  bool operator==(const AttributeSet&) const = default;
};

// Every token ranked by MI, descending, ties by ascending token.
inline AttributeSet rank_attributes(const TokenStats& stats) {
  std::vector<double> mi(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) {
    mi[i] = mutual_information(stats.counts[i], stats.n_spam, stats.n_legit);
  }
  std::vector<std::size_t> order(stats.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // stats.tokens is sorted, so index order is lexicographic order.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mi[a] > mi[b]; });
  AttributeSet ranked;
  ranked.tokens.reserve(order.size());
  ranked.scores.reserve(order.size());
  for (const std::size_t i : order) {
    ranked.tokens.push_back(stats.tokens[i]);
    ranked.scores.push_back(mi[i]);
  }
  return ranked;
}

inline AttributeSet select_attributes(const TokenStats& stats, std::size_t m) {
  if (m == 0) fail(ErrorKind::config, "attribute count m must be at least 1");
  if (stats.size() < m) {
    fail(ErrorKind::config, "requested " + std::to_string(m) + " attributes but only " +
                                std::to_string(stats.size()) + " distinct tokens exist");
  }
  return rank_attributes(stats).prefix(m);
}

// Token -> attribute position lookup, built once per attribute set.
class AttributeIndex {
 public:
  explicit AttributeIndex(const AttributeSet& attributes) : size_(attributes.size()) {
    positions_.reserve(attributes.size());
    for (std::size_t i = 0; i < attributes.size(); ++i) {
      positions_.emplace(attributes.tokens[i], i);
    }
  }

  std::size_t size() const noexcept { return size_; }

  BinaryVector vectorize(const Document& doc) const {
    BinaryVector bits(size_);
    for (const auto& token : doc.tokens) {
      if (const auto it = positions_.find(token); it != positions_.end()) {
        bits.set(it->second);
      }
    }
    return bits;
  }

 private:
  std::size_t size_;
  std::unordered_map<std::string, std::size_t> positions_;
};

inline BinaryVector vectorize(const Document& doc, const AttributeSet& attributes) {
  return AttributeIndex(attributes).vectorize(doc);
}

// One "token<TAB>score" line per attribute, rank order, 6 decimals.
inline void write_attributes(std::ostream& out, const AttributeSet& attributes) {
  char buffer[64];
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    std::snprintf(buffer, sizeof buffer, "%.6f", attributes.scores[i]);
    out << attributes.tokens[i] << '\t' << buffer << '\n';
  }
}

inline AttributeSet read_attributes(std::istream& in) {
  AttributeSet attributes;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      fail(ErrorKind::input, "malformed attribute line: " + line);
    }
    double score = 0;
    const char* first = line.data() + tab + 1;
    const char* last = line.data() + line.size();
    const auto [ptr, ec] = std::from_chars(first, last, score);
    if (ec != std::errc() || ptr != last) {
      fail(ErrorKind::input, "malformed attribute score: " + line);
    }
    attributes.tokens.push_back(line.substr(0, tab));
    attributes.scores.push_back(score);
  }
  return attributes;
}

}  // namespace spamfilter
