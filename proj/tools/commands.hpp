#pragma once

// Subcommand bodies for the spamfilter CLI. Each returns the process exit
// code: 0 success, 1 internal error, 2 input/corpus error, 3 config or
// compatibility error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spamfilter/spamfilter.hpp"

namespace spamfilter::cli {

enum ExitCode : int { ok = 0, internal_error = 1, input_error = 2, config_error = 3 };

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::input: return input_error;
      case ErrorKind::config: return config_error;
      case ErrorKind::logic: return internal_error;
    }
    return internal_error;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return internal_error;
  }
}

inline void validate(const RunConfig& config) {
  if (config.corpus.empty()) fail(ErrorKind::config, "--corpus is required");
  if (!(config.lambda > 0) || !std::isfinite(config.lambda)) {
    fail(ErrorKind::config, "--lambda must be a positive number");
  }
  if (config.classifier.k == 0) fail(ErrorKind::config, "--k must be at least 1");
  if (config.m && *config.m == 0) fail(ErrorKind::config, "--m must be at least 1");
  if (config.m_range) config.m_range->values();
}

// Writes to the --out path, or to `stdout_stream` for "-".
template <typename Writer>
void emit(const std::string& path, std::ostream& stdout_stream, Writer&& writer) {
  if (path == "-") {
    writer(stdout_stream);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(ErrorKind::input, "cannot write '" + path + "'");
  writer(file);
  if (!file) fail(ErrorKind::input, "error writing '" + path + "'");
}

inline int cmd_stats(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (config.corpus.empty()) fail(ErrorKind::config, "--corpus is required");
    const auto corpus = load_corpus(config.corpus, config.layout, config.normalizer());
    const auto stats = corpus_stats(corpus);
    out << "legit=" << stats.n_legit << " spam=" << stats.n_spam
        << " rate=" << spamfilter::detail::format_fixed(100 * stats.spam_rate, 1) << "%"
        << " vocab=" << stats.vocabulary_size << '\n';
    return ok;
  });
}

inline int cmd_evaluate(RunConfig config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (config.m_range) fail(ErrorKind::config, "evaluate takes a fixed --m; use sweep for ranges");
    if (!config.m) config.m = 100;
    validate(config);
    const auto corpus = load_corpus(config.corpus, config.layout, config.normalizer());
    const auto plan = make_stratified_folds(corpus, config.folds, config.seed);
    const auto result = cross_validate(corpus, config.classifier, config.lambda, *config.m, plan);
    emit(config.out, out, [&](std::ostream& s) { write_report(s, config, {result}); });
    std::istringstream lines(summary(result));
    for (std::string line; std::getline(lines, line);) {
      out << (config.out == "-" ? "# " : "") << line << '\n';
    }
    return ok;
  });
}

inline int cmd_sweep(RunConfig config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (config.m) fail(ErrorKind::config, "sweep takes --m-range, not --m");
    if (!config.m_range) config.m_range = AttributeRange{};
    validate(config);
    const auto corpus = load_corpus(config.corpus, config.layout, config.normalizer());
    const auto plan = make_stratified_folds(corpus, config.folds, config.seed);
    const auto results =
        sweep_attributes(corpus, config.classifier, config.lambda, *config.m_range, plan);
    emit(config.out, out, [&](std::ostream& s) { write_report(s, config, results); });
    if (config.out != "-") {
      out << "wrote " << results.size() << " rows to " << config.out << '\n';
    }
    return ok;
  });
}

struct CompareOptions {
  std::string first;
  std::string second;
  std::optional<std::size_t> m_first;
  std::optional<std::size_t> m_second;
};

namespace detail {

inline Report load_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::input, "cannot open '" + path + "'");
  return read_report(in);
}

inline const ReportRow& pick_row(const Report& report, std::optional<std::size_t> m,
                                 const std::string& path) {
  if (!m) {
    if (report.rows.size() > 1) {
      fail(ErrorKind::config, "'" + path + "' has several rows; choose one with --m-a/--m-b");
    }
    return report.rows.front();
  }
  for (const auto& row : report.rows) {
    if (row.m == *m) return row;
  }
  fail(ErrorKind::config, "'" + path + "' has no row with m=" + std::to_string(*m));
}

}  // namespace detail

// Paired one-tailed t-test of "first beats second" on per-fold WAcc. Both
// reports must come from the same corpus, preprocessing and fold plan.
inline int cmd_compare(const CompareOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto a = detail::load_report(options.first);
    const auto b = detail::load_report(options.second);
    for (const char* key : {"corpus", "layout", "stemming", "seed", "folds", "folds_stratified"}) {
      const auto ia = a.config.find(key);
      const auto ib = b.config.find(key);
      const bool present = ia != a.config.end() && ib != b.config.end();
      if (!present || ia->second != ib->second) {
        fail(ErrorKind::config, std::string("fold plans differ (") + key + ")");
      }
    }
    const auto& row_a = detail::pick_row(a, options.m_first, options.first);
    const auto& row_b = detail::pick_row(b, options.m_second, options.second);
    if (row_a.fold_wacc.size() != row_b.fold_wacc.size()) {
      fail(ErrorKind::config, "fold plans differ (fold count)");
    }
    const auto test = paired_t_test(row_a.fold_wacc, row_b.fold_wacc);
    out << "t=" << spamfilter::detail::format_fixed(test.t_statistic, 4)
        << " df=" << test.degrees_of_freedom
        << " critical=" << spamfilter::detail::format_fixed(test.critical_value, 3) << '\n'
        << (test.significant_at_05 ? "significant" : "not significant")
        << " (one-tailed, p < 0.05)\n";
    return ok;
  });
}

struct FixtureOptions {
  std::uint64_t seed = 7;
  std::size_t n_legit = 90;
  std::size_t n_spam = 10;
  std::string out;
};

inline int cmd_fixture(const FixtureOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.out.empty()) fail(ErrorKind::config, "--out is required");
    const auto corpus = generate_fixture_corpus(options.seed, options.n_legit, options.n_spam);
    write_corpus(corpus, options.out);
    out << "wrote " << corpus.size() << " messages to " << options.out << '\n';
    return ok;
  });
}

}  // namespace spamfilter::cli
