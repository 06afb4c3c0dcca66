#pragma once

// Corpus ingestion: message parsing, tokenization, token normalization,
// Ling-Spam style directory loading and a seeded synthetic corpus generator.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spamfilter/detail/random.hpp"
#include "spamfilter/error.hpp"

namespace spamfilter {

// Ordered legitimate < spam; deterministic tie-breaks rely on this.
enum class Label : std::uint8_t { legitimate = 0, spam = 1 };

inline std::string_view to_string(Label label) {
  return label == Label::spam ? "spam" : "legitimate";
}

struct RawMessage {
  std::string subject;
  std::string body;
  std::string source_id;

  bool operator==(const RawMessage&) const = default;
};

struct Document {
  std::vector<std::string> tokens;
  Label label = Label::legitimate;
  std::string source_id;

  bool operator==(const Document&) const = default;
};

enum class Stemming { none, light_suffix };

struct NormalizerConfig {
  bool lowercase = true;
  Stemming stemming = Stemming::light_suffix;
  std::size_t min_token_length = 1;
};

enum class Layout { lingspam, fixture };

inline Layout parse_layout(std::string_view id) {
  if (id == "lingspam") return Layout::lingspam;
  if (id == "fixture") return Layout::fixture;
  fail(ErrorKind::config, "unknown layout '" + std::string(id) + "'");
}

inline std::string_view to_string(Layout layout) {
  return layout == Layout::lingspam ? "lingspam" : "fixture";
}

// Immutable, sorted by source_id, with class tallies kept in sync.
class Corpus {
 public:
  Corpus() = default;

  explicit Corpus(std::vector<Document> documents)
      : documents_(std::move(documents)) {
    std::stable_sort(documents_.begin(), documents_.end(),
                     [](const Document& a, const Document& b) {
                       return a.source_id < b.source_id;
                     });
    for (const auto& doc : documents_) {
      (doc.label == Label::spam ? n_spam_ : n_legit_) += 1;
    }
  }

  const std::vector<Document>& documents() const noexcept { return documents_; }
  const Document& operator[](std::size_t i) const { return documents_[i]; }
  std::size_t size() const noexcept { return documents_.size(); }
  bool empty() const noexcept { return documents_.empty(); }
  std::size_t n_legit() const noexcept { return n_legit_; }
  std::size_t n_spam() const noexcept { return n_spam_; }

  bool operator==(const Corpus&) const = default;

 private:
  std::vector<Document> documents_;
  std::size_t n_legit_ = 0;
  std::size_t n_spam_ = 0;
};

// Replaces every invalid UTF-8 sequence with U+FFFD.
inline std::string decode_lossy(std::string_view bytes) {
  static constexpr std::string_view replacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  const auto byte = [&](std::size_t at) {
    return static_cast<unsigned char>(bytes[at]);
  };
  while (i < bytes.size()) {
    const unsigned char lead = byte(i);
    std::size_t len = 0;
    unsigned char lo = 0x80, hi = 0xBF;  // allowed range of the second byte
    if (lead < 0x80) {
      out.push_back(static_cast<char>(lead));
      ++i;
      continue;
    } else if (lead >= 0xC2 && lead <= 0xDF) {
      len = 2;
    } else if (lead >= 0xE0 && lead <= 0xEF) {
      len = 3;
      if (lead == 0xE0) lo = 0xA0;
      if (lead == 0xED) hi = 0x9F;
    } else if (lead >= 0xF0 && lead <= 0xF4) {
      len = 4;
      if (lead == 0xF0) lo = 0x90;
      if (lead == 0xF4) hi = 0x8F;
    }
    std::size_t valid = 0;
    if (len > 0) {
      valid = 1;
      while (valid < len && i + valid < bytes.size()) {
        const unsigned char c = byte(i + valid);
        const bool ok = valid == 1 ? (c >= lo && c <= hi) : (c >= 0x80 && c <= 0xBF);
        if (!ok) break;
        ++valid;
      }
    }
    if (len > 0 && valid == len) {
      out.append(bytes.substr(i, len));
      i += len;
    } else {
      out.append(replacement);
      i += std::max<std::size_t>(valid, 1);
    }
  }
  return out;
}

// A leading "Subject:" header runs up to the first blank line; everything
// after that blank line is the body. Without the header the whole text is
// body. Carriage returns are ignored.
inline RawMessage parse_message(std::string_view bytes, std::string source_id = {}) {
  if (bytes.empty()) fail(ErrorKind::input, "empty message");
  std::string text = decode_lossy(bytes);
  std::erase(text, '\r');

  RawMessage message;
  message.source_id = std::move(source_id);
  static constexpr std::string_view prefix = "Subject:";
  if (!std::string_view(text).starts_with(prefix)) {
    message.body = std::move(text);
    return message;
  }
  const auto blank = text.find("\n\n");
  std::string header;
  if (blank == std::string::npos) {
    const auto eol = text.find('\n');
    header = text.substr(0, eol);
    message.body = eol == std::string::npos ? std::string() : text.substr(eol + 1);
  } else {
    header = text.substr(0, blank);
    message.body = text.substr(blank + 2);
  }
  std::string_view subject = std::string_view(header).substr(prefix.size());
  while (!subject.empty() && (subject.front() == ' ' || subject.front() == '\t')) {
    subject.remove_prefix(1);
  }
  message.subject = std::string(subject);
  return message;
}

inline bool is_ascii_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Maximal runs of ASCII letters; everything else separates.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_ascii_alpha(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && is_ascii_alpha(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

namespace detail {

// Strips the longest matching suffix among {ing, ed, es, s, ly} when at least
// three characters remain. Returns false when nothing applies.
inline bool strip_light_suffix(std::string& token) {
  static constexpr std::string_view suffixes[] = {"ing", "ed", "es", "ly", "s"};
  for (const auto suffix : suffixes) {
    if (token.size() >= suffix.size() + 3 &&
        std::string_view(token).ends_with(suffix)) {
      token.resize(token.size() - suffix.size());
      return true;
    }
  }
  return false;
}

}  // namespace detail

// Suffix stripping is repeated until no rule applies, which makes the
// normalizer idempotent ("readings" -> "reading" -> "read").
inline std::optional<std::string> normalize_token(std::string_view token,
                                                  const NormalizerConfig& config) {
  std::string out(token);
  if (config.lowercase) {
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
  }
  if (config.stemming == Stemming::light_suffix) {
    while (detail::strip_light_suffix(out)) {
    }
  }
  if (out.empty() || out.size() < config.min_token_length) return std::nullopt;
  return out;
}

inline std::vector<std::string> normalize_tokens(const std::vector<std::string>& tokens,
                                                 const NormalizerConfig& config) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (auto normalized = normalize_token(token, config)) {
      out.push_back(std::move(*normalized));
    }
  }
  return out;
}

inline Document make_document(const RawMessage& message, Label label,
                              const NormalizerConfig& config) {
  Document doc;
  doc.tokens = normalize_tokens(tokenize(message.subject + " " + message.body), config);
  doc.label = label;
  doc.source_id = message.source_id;
  return doc;
}

inline Label label_for_path(const std::filesystem::path& path) {
  return path.filename().string().starts_with("spmsg") ? Label::spam : Label::legitimate;
}

// Both layouts share the directory convention: every regular file below
// `root` is one message, and basenames starting with "spmsg" are spam.
// source_id is the path relative to `root`, so documents sort by path.
inline Corpus load_corpus(const std::filesystem::path& root, Layout /*layout*/,
                          const NormalizerConfig& config = {}) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    fail(ErrorKind::input, "cannot read corpus directory '" + root.string() + "'");
  }
  std::vector<fs::path> files;
  fs::recursive_directory_iterator it(root, ec), end;
  if (ec) fail(ErrorKind::input, "cannot read corpus directory '" + root.string() + "'");
  for (; it != end; it.increment(ec)) {
    if (ec) fail(ErrorKind::input, "error walking '" + root.string() + "': " + ec.message());
    if (it->is_regular_file()) files.push_back(it->path());
  }
  if (files.empty()) fail(ErrorKind::input, "empty corpus");

  std::vector<Document> documents;
  documents.reserve(files.size());
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) fail(ErrorKind::input, "cannot open '" + file.string() + "'");
    const std::string bytes{std::istreambuf_iterator<char>(in), {}};
    auto relative = fs::relative(file, root).generic_string();
    // An empty file is still a message, with no tokens.
    RawMessage message = bytes.empty() ? RawMessage{{}, {}, std::move(relative)}
                                       : parse_message(bytes, std::move(relative));
    documents.push_back(make_document(message, label_for_path(file), config));
  }
  return Corpus(std::move(documents));
}

struct CorpusStats {
  std::size_t n_legit = 0;
  std::size_t n_spam = 0;
  double spam_rate = 0.0;
  std::size_t vocabulary_size = 0;
};

inline CorpusStats corpus_stats(const Corpus& corpus) {
  if (corpus.empty()) fail(ErrorKind::input, "empty corpus");
  std::set<std::string_view> vocabulary;
  for (const auto& doc : corpus.documents()) {
    vocabulary.insert(doc.tokens.begin(), doc.tokens.end());
  }
  CorpusStats stats;
  stats.n_legit = corpus.n_legit();
  stats.n_spam = corpus.n_spam();
  stats.spam_rate = static_cast<double>(stats.n_spam) /
                    static_cast<double>(stats.n_spam + stats.n_legit);
  stats.vocabulary_size = vocabulary.size();
  return stats;
}

// Synthetic corpus parameters. The vocabulary is split into spam-specific,
// legitimate-specific and shared words; word weights follow a Zipf law over a
// seeded permutation of the vocabulary.
struct FixtureParams {
  std::size_t vocabulary_size = 2000;
  double spam_word_fraction = 0.2;
  double legit_word_fraction = 0.3;
  // Relative weight a class gives to the other class's specific words.
  double overlap = 0.1;
  // Probability that a token is drawn from the other class's distribution.
  double noise = 0.1;
  double zipf_exponent = 1.0;
  std::size_t min_length = 10;
  std::size_t max_length = 60;
};

namespace detail {

// Pronounceable lowercase words ending in a vowel; none of them carries a
// strippable suffix, so fixture tokens survive any normalizer unchanged.
inline std::string fixture_word(std::size_t index) {
  static constexpr std::string_view consonants = "bcfhjklmnprtvwz";
  static constexpr std::string_view vowels = "aiou";
  const std::size_t syllables = consonants.size() * vowels.size();
  std::string word;
  std::size_t n = index + syllables;  // at least two syllables
  while (n > 0) {
    const std::size_t s = n % syllables;
    word.push_back(consonants[s / vowels.size()]);
    word.push_back(vowels[s % vowels.size()]);
    n /= syllables;
  }
  return word;
}

class CategoricalSampler {
 public:
  explicit CategoricalSampler(const std::vector<double>& weights) {
    cumulative_.reserve(weights.size());
    double total = 0.0;
    for (double w : weights) cumulative_.push_back(total += w);
  }

  std::size_t operator()(Engine& engine) const {
    const double u = uniform_unit(engine) * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                 cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace detail

inline Corpus generate_fixture_corpus(std::uint64_t seed, std::size_t n_legit,
                                      std::size_t n_spam,
                                      const FixtureParams& params = {}) {
  if (n_legit + n_spam == 0) {
    fail(ErrorKind::config, "fixture corpus needs at least one message");
  }
  if (params.vocabulary_size < 3 || params.min_length == 0 ||
      params.max_length < params.min_length ||
      params.spam_word_fraction + params.legit_word_fraction > 1.0) {
    fail(ErrorKind::config, "invalid fixture parameters");
  }
  detail::Engine engine(seed);

  const std::size_t vocab = params.vocabulary_size;
  std::vector<std::size_t> order(vocab);
  for (std::size_t i = 0; i < vocab; ++i) order[i] = i;
  detail::shuffle(std::span(order), engine);

  const auto n_spam_words = static_cast<std::size_t>(params.spam_word_fraction * vocab);
  const auto n_legit_words = static_cast<std::size_t>(params.legit_word_fraction * vocab);
  std::vector<double> spam_weights(vocab), legit_weights(vocab);
  for (std::size_t rank = 0; rank < vocab; ++rank) {
    const std::size_t word = order[rank];
    const double base = 1.0 / std::pow(static_cast<double>(rank + 1), params.zipf_exponent);
    // Roles follow word index while weights follow the permuted rank, so each
    // role gets a mix of frequent and rare words.
    if (word < n_spam_words) {
      spam_weights[word] = base;
      legit_weights[word] = base * params.overlap;
    } else if (word < n_spam_words + n_legit_words) {
      spam_weights[word] = base * params.overlap;
      legit_weights[word] = base;
    } else {
      spam_weights[word] = base;
      legit_weights[word] = base;
    }
  }
  const detail::CategoricalSampler spam_sampler(spam_weights);
  const detail::CategoricalSampler legit_sampler(legit_weights);

  std::vector<Document> documents;
  documents.reserve(n_legit + n_spam);
  const auto emit = [&](Label label, std::size_t index) {
    const auto& own = label == Label::spam ? spam_sampler : legit_sampler;
    const auto& other = label == Label::spam ? legit_sampler : spam_sampler;
    const std::size_t span = params.max_length - params.min_length + 1;
    const std::size_t length =
        params.min_length + static_cast<std::size_t>(detail::uniform_below(engine, span));
    Document doc;
    doc.label = label;
    doc.tokens.reserve(length);
    for (std::size_t t = 0; t < length; ++t) {
      const bool from_other = detail::uniform_unit(engine) < params.noise;
      doc.tokens.push_back(detail::fixture_word((from_other ? other : own)(engine)));
    }
    char name[32];
    std::snprintf(name, sizeof name, "%s%05zu.txt",
                  label == Label::spam ? "spmsg" : "legit", index);
    doc.source_id = name;
    documents.push_back(std::move(doc));
  };
  for (std::size_t i = 0; i < n_legit; ++i) emit(Label::legitimate, i);
  for (std::size_t i = 0; i < n_spam; ++i) emit(Label::spam, i);
  return Corpus(std::move(documents));
}

// Writes every document as "<source_id>" under `root`: a Subject line with
// the first few tokens, a blank line, then the remaining tokens.
inline void write_corpus(const Corpus& corpus, const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) fail(ErrorKind::input, "cannot create '" + root.string() + "': " + ec.message());
  constexpr std::size_t subject_words = 3;
  constexpr std::size_t words_per_line = 12;
  for (const auto& doc : corpus.documents()) {
    const fs::path file = root / doc.source_id;
    fs::create_directories(file.parent_path(), ec);
    std::ofstream out(file, std::ios::binary);
    if (!out) fail(ErrorKind::input, "cannot write '" + file.string() + "'");
    out << "Subject:";
    const std::size_t n_subject = std::min(subject_words, doc.tokens.size());
    for (std::size_t i = 0; i < n_subject; ++i) out << ' ' << doc.tokens[i];
    out << "\n\n";
    for (std::size_t i = n_subject; i < doc.tokens.size(); ++i) {
      out << doc.tokens[i];
      const bool line_end = (i - n_subject + 1) % words_per_line == 0;
      out << (line_end || i + 1 == doc.tokens.size() ? '\n' : ' ');
    }
  }
}

}  // namespace spamfilter
