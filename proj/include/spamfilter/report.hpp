#pragma once

// Run configuration and the report file format shared by the CLI commands.
//
// A report file is
//   # spamfilter-report v1 corpus=<path> layout=... stemming=... classifier=...
//     lambda=... m=... m_range=... k=... seed=... folds=10 folds_stratified=1
//   classifier,lambda,m,k,seed,sr,sp,wacc_mean,werr_mean,baseline_werr,tcr,fold_waccs
//   <one row per evaluation>
// Rates are fractions; infinite TCR and undefined precision print as "inf".

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spamfilter/bayes.hpp"
#include "spamfilter/corpus.hpp"
#include "spamfilter/error.hpp"
#include "spamfilter/evaluate.hpp"

namespace spamfilter {

inline constexpr std::string_view report_magic = "# spamfilter-report v1";
inline constexpr std::string_view report_columns =
    "classifier,lambda,m,k,seed,sr,sp,wacc_mean,werr_mean,baseline_werr,tcr,fold_waccs";
inline constexpr std::size_t default_folds = 10;

struct RunConfig {
  std::string corpus;
  Layout layout = Layout::lingspam;
  Stemming stemming = Stemming::light_suffix;
  ClassifierConfig classifier;
  double lambda = 1;
  std::optional<std::size_t> m;
  std::optional<AttributeRange> m_range;
  std::uint64_t seed = 1;
  std::size_t folds = default_folds;
  std::string out = "-";

  NormalizerConfig normalizer() const {
    NormalizerConfig config;
    config.stemming = stemming;
    return config;
  }
};

inline std::string_view to_string(Stemming stemming) {
  return stemming == Stemming::none ? "none" : "light";
}

inline Stemming parse_stemming(std::string_view id) {
  if (id == "none") return Stemming::none;
  if (id == "light") return Stemming::light_suffix;
  fail(ErrorKind::config, "unknown stemming mode '" + std::string(id) + "'");
}

inline AttributeRange parse_range(std::string_view text) {
  AttributeRange range;
  std::size_t* fields[3] = {&range.from, &range.to, &range.step};
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int i = 0; i < 3; ++i) {
    const auto [next, ec] = std::from_chars(p, end, *fields[i]);
    if (ec != std::errc()) fail(ErrorKind::config, "malformed range '" + std::string(text) + "'");
    p = next;
    if (i < 2) {
      if (p == end || *p != ':') fail(ErrorKind::config, "malformed range '" + std::string(text) + "'");
      ++p;
    }
  }
  if (p != end) fail(ErrorKind::config, "malformed range '" + std::string(text) + "'");
  range.values();  // validates
  return range;
}

namespace detail {

inline std::string format_fixed(double value, int decimals) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
  return buffer;
}

// Spaces and '%' are percent-encoded so echo values never contain spaces.
inline std::string encode_value(std::string_view value) {
  std::string out;
  for (const char c : value) {
    if (c == '%') {
      out += "%25";
    } else if (c == ' ') {
      out += "%20";
    } else {
      out += c;
    }
  }
  return out;
}

inline std::string decode_value(std::string_view value) {
  std::string out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (value.substr(i, 3) == "%25") {
      out += '%';
      i += 2;
    } else if (value.substr(i, 3) == "%20") {
      out += ' ';
      i += 2;
    } else {
      out += value[i];
    }
  }
  return out;
}

}  // namespace detail

inline std::string format_lambda(double lambda) { return detail::format_exact(lambda); }

// Header comment echoing the full configuration. Contains nothing run-specific
// (no timestamps), so identical configurations give identical files.
inline std::string config_echo(const RunConfig& config) {
  std::ostringstream out;
  out << report_magic << " corpus=" << detail::encode_value(config.corpus)
      << " layout=" << to_string(config.layout) << " stemming=" << to_string(config.stemming)
      << " classifier=" << to_string(config.classifier.kind)
      << " lambda=" << format_lambda(config.lambda) << " m=";
  if (config.m) out << *config.m;
  out << " m_range=";
  if (config.m_range) {
    out << config.m_range->from << ':' << config.m_range->to << ':' << config.m_range->step;
  }
  out << " k=";
  if (config.classifier.kind == ClassifierKind::memory_based) out << config.classifier.k;
  out << " seed=" << config.seed << " folds=" << config.folds << " folds_stratified=1";
  return out.str();
}

inline std::map<std::string, std::string> parse_config_echo(std::string_view line) {
  if (!line.starts_with(report_magic)) fail(ErrorKind::input, "not a spamfilter report");
  std::map<std::string, std::string> fields;
  std::istringstream in{std::string(line.substr(report_magic.size()))};
  std::string item;
  while (in >> item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorKind::input, "malformed config echo item '" + item + "'");
    fields[item.substr(0, eq)] = detail::decode_value(item.substr(eq + 1));
  }
  return fields;
}

inline std::string csv_row(const AggregateResult& result, std::uint64_t seed) {
  using detail::format_fixed;
  constexpr int decimals = 9;
  std::ostringstream row;
  row << to_string(result.classifier.kind) << ',' << format_lambda(result.lambda) << ','
      << result.m << ',';
  if (result.classifier.kind == ClassifierKind::memory_based) row << result.classifier.k;
  row << ',' << seed << ',' << format_fixed(result.spam_recall, decimals) << ','
      << (result.spam_precision ? format_fixed(*result.spam_precision, decimals) : "inf") << ','
      << format_fixed(result.mean_wacc, decimals) << ','
      << format_fixed(result.mean_werr, decimals) << ','
      << format_fixed(result.baseline_werr, decimals) << ','
      << format_fixed(result.tcr, decimals) << ',';
  for (std::size_t i = 0; i < result.fold_wacc.size(); ++i) {
    if (i > 0) row << ';';
    row << format_fixed(result.fold_wacc[i], 6);
  }
  return row.str();
}

inline void write_report(std::ostream& out, const RunConfig& config,
                         const std::vector<AggregateResult>& results) {
  out << config_echo(config) << '\n' << report_columns << '\n';
  for (const auto& result : results) out << csv_row(result, config.seed) << '\n';
}

struct ReportRow {
  std::string classifier;
  std::string lambda;
  std::size_t m = 0;
  std::string k;
  std::string seed;
  std::vector<double> fold_wacc;
};

struct Report {
  std::map<std::string, std::string> config;
  std::vector<ReportRow> rows;
};

inline Report read_report(std::istream& in) {
  Report report;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::input, "empty report file");
  report.config = parse_config_echo(line);
  if (!std::getline(in, line) || line != report_columns) {
    fail(ErrorKind::input, "report column header missing or unexpected");
  }
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream cells_in(line);
    std::string cell;
    while (std::getline(cells_in, cell, ',')) cells.push_back(cell);
    if (cells.size() != 12) fail(ErrorKind::input, "malformed report row: " + line);
    ReportRow row;
    row.classifier = cells[0];
    row.lambda = cells[1];
    {
      const auto [ptr, ec] = std::from_chars(cells[2].data(), cells[2].data() + cells[2].size(), row.m);
      if (ec != std::errc()) fail(ErrorKind::input, "malformed m in row: " + line);
    }
    row.k = cells[3];
    row.seed = cells[4];
    std::stringstream folds(cells[11]);
    std::string value;
    while (std::getline(folds, value, ';')) row.fold_wacc.push_back(detail::parse_double(value));
    report.rows.push_back(std::move(row));
  }
  if (report.rows.empty()) fail(ErrorKind::input, "report has no result rows");
  return report;
}

// Human-readable rendering with rates as percentages (3 decimals).
inline std::string summary(const AggregateResult& result) {
  using detail::format_fixed;
  std::ostringstream out;
  out << "classifier=" << to_string(result.classifier.kind);
  if (result.classifier.kind == ClassifierKind::memory_based) out << " k=" << result.classifier.k;
  out << " lambda=" << format_lambda(result.lambda) << " m=" << result.m << '\n'
      << "spam recall    " << format_fixed(100 * result.spam_recall, 3) << "%\n"
      << "spam precision "
      << (result.spam_precision ? format_fixed(100 * *result.spam_precision, 3) + "%" : "inf")
      << '\n'
      << "weighted acc   " << format_fixed(100 * result.mean_wacc, 3) << "%\n"
      << "baseline wacc  " << format_fixed(100 * result.baseline_wacc, 3) << "%\n"
      << "TCR            " << format_fixed(result.tcr, 3) << '\n';
  return out.str();
}

}  // namespace spamfilter
