#pragma once

// Naive Bayes over binary attributes with a cost-sensitive decision rule:
// a message is spam when P(spam | x) > t, where t = lambda / (1 + lambda)
// and lambda is the cost of blocking a legitimate message relative to
// letting one spam message through.

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "spamfilter/corpus.hpp"
#include "spamfilter/error.hpp"
#include "spamfilter/features.hpp"

namespace spamfilter {

enum class Smoothing { laplace, none };

class DecisionPolicy {
 public:
  explicit DecisionPolicy(double lambda) : lambda_(lambda) {
    if (!(lambda > 0) || !std::isfinite(lambda)) {
      fail(ErrorKind::config, "lambda must be a positive finite number");
    }
    threshold_ = lambda / (1.0 + lambda);
  }

  double lambda() const noexcept { return lambda_; }
  double threshold() const noexcept { return threshold_; }

 private:
  double lambda_;
  double threshold_;
};

inline double lambda_to_threshold(double lambda) {
  return DecisionPolicy(lambda).threshold();
}

inline double threshold_to_lambda(double threshold) {
  if (!(threshold > 0 && threshold < 1)) {
    fail(ErrorKind::config, "threshold must lie strictly between 0 and 1");
  }
  return threshold / (1.0 - threshold);
}

class NaiveBayesModel {
 public:
  // p_spam[i], p_legit[i] are P(X_i = 1 | class).
  NaiveBayesModel(double prior_spam, std::vector<double> p_spam, std::vector<double> p_legit)
      : prior_spam_(prior_spam),
        p_spam_(std::move(p_spam)),
        p_legit_(std::move(p_legit)) {
    if (p_spam_.size() != p_legit_.size()) {
      fail(ErrorKind::logic, "conditional tables differ in length");
    }
    if (!(prior_spam_ > 0 && prior_spam_ < 1)) {
      fail(ErrorKind::logic, "spam prior must lie strictly between 0 and 1");
    }
    const std::size_t m = p_spam_.size();
    for (auto* table : {&log_spam_, &log_legit_}) table->resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      log_spam_[i] = {std::log1p(-p_spam_[i]), std::log(p_spam_[i])};
      log_legit_[i] = {std::log1p(-p_legit_[i]), std::log(p_legit_[i])};
    }
  }

  std::size_t size() const noexcept { return p_spam_.size(); }
  double prior_spam() const noexcept { return prior_spam_; }
  double prior_legit() const noexcept { return 1.0 - prior_spam_; }
  std::span<const double> p_present_spam() const noexcept { return p_spam_; }
  std::span<const double> p_present_legit() const noexcept { return p_legit_; }

  struct LogJoint {
    double spam;   // log P(spam) + sum_i log P(X_i = x_i | spam)
    double legit;  // same for legitimate
  };

  LogJoint log_joint(const BinaryVector& x) const {
    if (x.size() != size()) {
      fail(ErrorKind::logic, "vector has " + std::to_string(x.size()) +
                                 " attributes, model expects " + std::to_string(size()));
    }
    LogJoint joint{std::log(prior_spam_), std::log(prior_legit())};
    for (std::size_t i = 0; i < size(); ++i) {
      const int bit = x[i] ? 1 : 0;
      joint.spam += log_spam_[i][bit];
      joint.legit += log_legit_[i][bit];
    }
    return joint;
  }

 private:
  double prior_spam_;
  std::vector<double> p_spam_;
  std::vector<double> p_legit_;
  // [i][0] = log P(X_i = 0 | c), [i][1] = log P(X_i = 1 | c)
  std::vector<std::array<double, 2>> log_spam_;
  std::vector<std::array<double, 2>> log_legit_;
};

inline NaiveBayesModel train_naive_bayes(std::span<const LabeledVector> training,
                                         Smoothing smoothing = Smoothing::laplace) {
  if (training.empty()) fail(ErrorKind::input, "degenerate training set");
  const std::size_t m = training.front().vector.size();
  std::size_t n_spam = 0, n_legit = 0;
  std::vector<std::size_t> present_spam(m, 0), present_legit(m, 0);
  for (const auto& [vector, label] : training) {
    if (vector.size() != m) fail(ErrorKind::logic, "training vectors differ in length");
    auto& present = label == Label::spam ? present_spam : present_legit;
    (label == Label::spam ? n_spam : n_legit) += 1;
    for (std::size_t i = 0; i < m; ++i) present[i] += vector[i];
  }
  if (n_spam == 0 || n_legit == 0) fail(ErrorKind::input, "degenerate training set");

  const double add = smoothing == Smoothing::laplace ? 1.0 : 0.0;
  const auto estimate = [&](std::size_t count, std::size_t n) {
    return (static_cast<double>(count) + add) / (static_cast<double>(n) + 2 * add);
  };
  std::vector<double> p_spam(m), p_legit(m);
  for (std::size_t i = 0; i < m; ++i) {
    p_spam[i] = estimate(present_spam[i], n_spam);
    p_legit[i] = estimate(present_legit[i], n_legit);
  }
  const double prior = static_cast<double>(n_spam) / static_cast<double>(n_spam + n_legit);
  return NaiveBayesModel(prior, std::move(p_spam), std::move(p_legit));
}

namespace detail {

// P(spam | x) from the two log joints, normalized without leaving log space
// until the final exponential.
inline double spam_share(double log_spam, double log_legit, double prior_spam) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  // Only reachable with unsmoothed tables: x is impossible under both classes.
  if (log_spam == neg_inf && log_legit == neg_inf) return prior_spam;
  const double diff = log_spam - log_legit;
  return diff >= 0 ? 1.0 / (1.0 + std::exp(-diff)) : std::exp(diff) / (1.0 + std::exp(diff));
}

}  // namespace detail

inline double posterior_spam(const NaiveBayesModel& model, const BinaryVector& x) {
  const auto joint = model.log_joint(x);
  return detail::spam_share(joint.spam, joint.legit, model.prior_spam());
}

inline double posterior_legit(const NaiveBayesModel& model, const BinaryVector& x) {
  const auto joint = model.log_joint(x);
  return detail::spam_share(joint.legit, joint.spam, model.prior_legit());
}

// Strict inequality: a posterior equal to the threshold stays legitimate.
inline Label classify_nb(const NaiveBayesModel& model, const BinaryVector& x,
                         const DecisionPolicy& policy) {
  return posterior_spam(model, x) > policy.threshold() ? Label::spam : Label::legitimate;
}

namespace detail {

inline std::string format_exact(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

inline double parse_double(std::string_view text) {
  double value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(ErrorKind::input, "malformed number '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace detail

// Text format:
//   nb m=<m>
//   priors <P(spam)> <P(legit)>
//   <P(X=1|spam)> <P(X=0|spam)> <P(X=1|legit)> <P(X=0|legit)>   (m lines)
// Numbers use the shortest representation that parses back exactly.
inline void write_model(std::ostream& out, const NaiveBayesModel& model) {
  using detail::format_exact;
  out << "nb m=" << model.size() << '\n';
  out << "priors " << format_exact(model.prior_spam()) << ' '
      << format_exact(model.prior_legit()) << '\n';
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double s = model.p_present_spam()[i];
    const double l = model.p_present_legit()[i];
    out << format_exact(s) << ' ' << format_exact(1.0 - s) << ' ' << format_exact(l) << ' '
        << format_exact(1.0 - l) << '\n';
  }
}

inline NaiveBayesModel read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("nb m=")) {
    fail(ErrorKind::input, "not a naive Bayes model file");
  }
  std::size_t m = 0;
  {
    const char* first = line.data() + 5;
    const char* last = line.data() + line.size();
    const auto [ptr, ec] = std::from_chars(first, last, m);
    if (ec != std::errc() || ptr != last) fail(ErrorKind::input, "malformed model header");
  }
  std::string word, spam_text, legit_text;
  if (!std::getline(in, line)) fail(ErrorKind::input, "missing priors line");
  std::istringstream priors(line);
  if (!(priors >> word >> spam_text >> legit_text) || word != "priors") {
    fail(ErrorKind::input, "malformed priors line");
  }
  const double prior_spam = detail::parse_double(spam_text);
  std::vector<double> p_spam, p_legit;
  p_spam.reserve(m);
  p_legit.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::getline(in, line)) fail(ErrorKind::input, "truncated model file");
    std::istringstream row(line);
    std::string fields[4];
    if (!(row >> fields[0] >> fields[1] >> fields[2] >> fields[3])) {
      fail(ErrorKind::input, "malformed conditional line " + std::to_string(i + 1));
    }
    p_spam.push_back(detail::parse_double(fields[0]));
    p_legit.push_back(detail::parse_double(fields[2]));
  }
  return NaiveBayesModel(prior_spam, std::move(p_spam), std::move(p_legit));
}

}  // namespace spamfilter
