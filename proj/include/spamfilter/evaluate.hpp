#pragma once

// Cost-sensitive evaluation: confusion counts, weighted accuracy, total cost
// ratio, spam recall/precision, stratified k-fold cross-validation, attribute
// count sweeps and paired one-tailed t-tests over per-fold weighted accuracy.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "spamfilter/bayes.hpp"
#include "spamfilter/corpus.hpp"
#include "spamfilter/detail/random.hpp"
#include "spamfilter/error.hpp"
#include "spamfilter/features.hpp"
#include "spamfilter/memory_based.hpp"

namespace spamfilter {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// n_<gold>_<predicted>
struct ConfusionCounts {
  std::size_t n_legit_legit = 0;
  std::size_t n_legit_spam = 0;
  std::size_t n_spam_spam = 0;
  std::size_t n_spam_legit = 0;

  std::size_t n_legit() const noexcept { return n_legit_legit + n_legit_spam; }
  std::size_t n_spam() const noexcept { return n_spam_spam + n_spam_legit; }
  std::size_t total() const noexcept { return n_legit() + n_spam(); }

  void add(Label gold, Label predicted) {
    if (gold == Label::legitimate) {
      (predicted == Label::legitimate ? n_legit_legit : n_legit_spam) += 1;
    } else {
      (predicted == Label::spam ? n_spam_spam : n_spam_legit) += 1;
    }
  }

  ConfusionCounts& operator+=(const ConfusionCounts& other) {
    n_legit_legit += other.n_legit_legit;
    n_legit_spam += other.n_legit_spam;
    n_spam_spam += other.n_spam_spam;
    n_spam_legit += other.n_spam_legit;
    return *this;
  }

  bool operator==(const ConfusionCounts&) const = default;
};

inline ConfusionCounts confusion_counts(std::span<const Label> gold,
                                        std::span<const Label> predicted) {
  if (gold.size() != predicted.size()) {
    fail(ErrorKind::logic, "gold and predicted label sequences differ in length");
  }
  ConfusionCounts counts;
  for (std::size_t i = 0; i < gold.size(); ++i) counts.add(gold[i], predicted[i]);
  return counts;
}

struct WeightedScore {
  double wacc = 0;
  double werr = 0;
};

namespace detail {

inline void require_lambda(double lambda) {
  if (!(lambda > 0) || !std::isfinite(lambda)) {
    fail(ErrorKind::config, "lambda must be a positive finite number");
  }
}

}  // namespace detail

// Each legitimate message counts as lambda messages.
inline WeightedScore weighted_accuracy(const ConfusionCounts& counts, double lambda) {
  detail::require_lambda(lambda);
  if (counts.total() == 0) fail(ErrorKind::logic, "weighted accuracy of zero messages");
  const double numerator = lambda * static_cast<double>(counts.n_legit_legit) +
                           static_cast<double>(counts.n_spam_spam);
  const double denominator = lambda * static_cast<double>(counts.n_legit()) +
                             static_cast<double>(counts.n_spam());
  const double wacc = numerator / denominator;
  return {wacc, 1.0 - wacc};
}

// No filter: every legitimate message passes, every spam message passes.
inline WeightedScore baseline_metrics(std::size_t n_legit, std::size_t n_spam, double lambda) {
  ConfusionCounts counts;
  counts.n_legit_legit = n_legit;
  counts.n_spam_legit = n_spam;
  return weighted_accuracy(counts, lambda);
}

// N_spam / (lambda * n_legit_spam + n_spam_legit); infinite for a perfect filter.
inline double total_cost_ratio(const ConfusionCounts& counts, double lambda) {
  detail::require_lambda(lambda);
  const double cost = lambda * static_cast<double>(counts.n_legit_spam) +
                      static_cast<double>(counts.n_spam_legit);
  if (cost == 0) return infinity;
  return static_cast<double>(counts.n_spam()) / cost;
}

struct RecallPrecision {
  double recall = 0;
  std::optional<double> precision;  // empty when nothing was blocked
};

inline RecallPrecision spam_recall_precision(const ConfusionCounts& counts) {
  if (counts.n_spam() == 0) fail(ErrorKind::logic, "spam recall needs at least one spam message");
  RecallPrecision out;
  out.recall = static_cast<double>(counts.n_spam_spam) / static_cast<double>(counts.n_spam());
  const std::size_t blocked = counts.n_spam_spam + counts.n_legit_spam;
  if (blocked > 0) {
    out.precision = static_cast<double>(counts.n_spam_spam) / static_cast<double>(blocked);
  }
  return out;
}

struct Metrics {
  double acc = 0, err = 0;
  double wacc = 0, werr = 0;
  double baseline_wacc = 0, baseline_werr = 0;
  double tcr = 0;
  double spam_recall = 0;
  std::optional<double> spam_precision;
};

inline Metrics compute_metrics(const ConfusionCounts& counts, double lambda) {
  Metrics m;
  const auto plain = weighted_accuracy(counts, 1.0);
  m.acc = plain.wacc;
  m.err = plain.werr;
  const auto weighted = weighted_accuracy(counts, lambda);
  m.wacc = weighted.wacc;
  m.werr = weighted.werr;
  const auto baseline = baseline_metrics(counts.n_legit(), counts.n_spam(), lambda);
  m.baseline_wacc = baseline.wacc;
  m.baseline_werr = baseline.werr;
  m.tcr = total_cost_ratio(counts, lambda);
  if (counts.n_spam() > 0) {
    const auto rp = spam_recall_precision(counts);
    m.spam_recall = rp.recall;
    m.spam_precision = rp.precision;
  }
  return m;
}

// Assignment of every document to one of k folds.
class FoldPlan {
 public:
  FoldPlan(std::size_t k_folds, std::uint64_t seed, std::vector<std::size_t> assignment)
      : k_folds_(k_folds), seed_(seed), assignment_(std::move(assignment)) {
    for (const auto fold : assignment_) {
      if (fold >= k_folds_) fail(ErrorKind::logic, "fold id out of range");
    }
  }

  std::size_t k_folds() const noexcept { return k_folds_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::span<const std::size_t> assignment() const noexcept { return assignment_; }
  std::size_t size() const noexcept { return assignment_.size(); }

  std::vector<std::size_t> test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment_.size(); ++i) {
      if (assignment_[i] == fold) out.push_back(i);
    }
    return out;
  }

  std::vector<std::size_t> train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment_.size(); ++i) {
      if (assignment_[i] != fold) out.push_back(i);
    }
    return out;
  }

  bool operator==(const FoldPlan&) const = default;

 private:
  std::size_t k_folds_;
  std::uint64_t seed_;
  std::vector<std::size_t> assignment_;
};

// Each class is shuffled independently and dealt round-robin; spam dealing
// continues where the legitimate dealing stopped, so fold sizes also differ
// by at most one.
inline FoldPlan make_stratified_folds(const Corpus& corpus, std::size_t k_folds,
                                      std::uint64_t seed) {
  if (k_folds < 2) fail(ErrorKind::config, "cross-validation needs at least 2 folds");
  if (corpus.n_legit() < k_folds || corpus.n_spam() < k_folds) {
    fail(ErrorKind::input, "corpus needs at least " + std::to_string(k_folds) +
                               " documents of each class for " + std::to_string(k_folds) +
                               "-fold cross-validation");
  }
  std::vector<std::size_t> legit, spam;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (corpus[i].label == Label::spam ? spam : legit).push_back(i);
  }
  detail::Engine engine(seed);
  detail::shuffle(std::span(legit), engine);
  detail::shuffle(std::span(spam), engine);

  std::vector<std::size_t> assignment(corpus.size());
  std::size_t next = 0;
  for (const auto i : legit) assignment[i] = next++ % k_folds;
  for (const auto i : spam) assignment[i] = next++ % k_folds;
  return FoldPlan(k_folds, seed, std::move(assignment));
}

enum class ClassifierKind {
  naive_bayes,
  memory_based,
  always_legitimate,  // the no-filter baseline
  oracle,             // returns gold labels; exercises the perfect-filter paths
};

inline std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::naive_bayes: return "nb";
    case ClassifierKind::memory_based: return "mb";
    case ClassifierKind::always_legitimate: return "legit";
    case ClassifierKind::oracle: return "oracle";
  }
  return "?";
}

inline ClassifierKind parse_classifier(std::string_view id) {
  for (auto kind : {ClassifierKind::naive_bayes, ClassifierKind::memory_based,
                    ClassifierKind::always_legitimate, ClassifierKind::oracle}) {
    if (to_string(kind) == id) return kind;
  }
  fail(ErrorKind::config, "unknown classifier '" + std::string(id) + "'");
}

struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::naive_bayes;
  std::size_t k = 1;  // memory-based only
  Smoothing smoothing = Smoothing::laplace;
};

struct AggregateResult {
  ClassifierConfig classifier;
  double lambda = 1;
  std::size_t m = 0;
  std::vector<ConfusionCounts> fold_counts;
  std::vector<double> fold_wacc;
  ConfusionCounts pooled;
  double mean_wacc = 0;
  double mean_werr = 0;
  double baseline_wacc = 0;  // whole-corpus closed form
  double baseline_werr = 0;
  double tcr = 0;            // baseline_werr / mean_werr
  double spam_recall = 0;    // pooled over folds
  std::optional<double> spam_precision;
};

namespace detail {

// Runs body(i) for i in [0, n) on a small thread pool. Results must be
// written to per-index slots; the first exception is rethrown.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1U, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

// Mean computed as x0 + sum(x_i - x0) / n: exact when all values are equal.
inline double stable_mean(std::span<const double> values) {
  if (values.empty()) return 0;
  const double anchor = values.front();
  double deviation = 0;
  for (const double v : values) deviation += v - anchor;
  return anchor + deviation / static_cast<double>(values.size());
}

struct PreparedFold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  AttributeSet ranking;  // every training token, best first
};

inline std::vector<PreparedFold> prepare_folds(const Corpus& corpus, const FoldPlan& plan) {
  if (plan.size() != corpus.size()) {
    fail(ErrorKind::logic, "fold plan does not match the corpus");
  }
  std::vector<PreparedFold> folds(plan.k_folds());
  parallel_for(folds.size(), [&](std::size_t f) {
    folds[f].train = plan.train_indices(f);
    folds[f].test = plan.test_indices(f);
    // Attribute selection sees the training folds only.
    folds[f].ranking = rank_attributes(token_class_counts(corpus, folds[f].train));
  });
  return folds;
}

inline ConfusionCounts evaluate_fold(const Corpus& corpus, const PreparedFold& fold,
                                     const ClassifierConfig& config, const DecisionPolicy& policy,
                                     std::size_t m) {
  if (fold.ranking.size() < m) {
    fail(ErrorKind::config, "requested " + std::to_string(m) + " attributes but a training split has only " +
                                std::to_string(fold.ranking.size()) + " distinct tokens");
  }
  const AttributeIndex index(fold.ranking.prefix(m));
  std::vector<LabeledVector> training;
  training.reserve(fold.train.size());
  for (const auto i : fold.train) training.push_back({index.vectorize(corpus[i]), corpus[i].label});

  ConfusionCounts counts;
  switch (config.kind) {
    case ClassifierKind::naive_bayes: {
      const auto model = train_naive_bayes(training, config.smoothing);
      for (const auto i : fold.test) {
        counts.add(corpus[i].label, classify_nb(model, index.vectorize(corpus[i]), policy));
      }
      break;
    }
    case ClassifierKind::memory_based: {
      const InstanceBase base(std::move(training));
      for (const auto i : fold.test) {
        counts.add(corpus[i].label, classify_mb(base, index.vectorize(corpus[i]), config.k, policy));
      }
      break;
    }
    case ClassifierKind::always_legitimate:
      for (const auto i : fold.test) counts.add(corpus[i].label, Label::legitimate);
      break;
    case ClassifierKind::oracle:
      for (const auto i : fold.test) counts.add(corpus[i].label, corpus[i].label);
      break;
  }
  return counts;
}

inline AggregateResult aggregate(const Corpus& corpus, const ClassifierConfig& config,
                                 double lambda, std::size_t m,
                                 std::vector<ConfusionCounts> fold_counts) {
  AggregateResult result;
  result.classifier = config;
  result.lambda = lambda;
  result.m = m;
  std::vector<double> fold_werr;
  for (const auto& counts : fold_counts) {
    const auto score = weighted_accuracy(counts, lambda);
    result.fold_wacc.push_back(score.wacc);
    fold_werr.push_back(score.werr);
    result.pooled += counts;
  }
  result.fold_counts = std::move(fold_counts);
  result.mean_wacc = stable_mean(result.fold_wacc);
  result.mean_werr = stable_mean(fold_werr);
  const auto baseline = baseline_metrics(corpus.n_legit(), corpus.n_spam(), lambda);
  result.baseline_wacc = baseline.wacc;
  result.baseline_werr = baseline.werr;
  result.tcr = result.mean_werr == 0 ? infinity : result.baseline_werr / result.mean_werr;
  const auto rp = spam_recall_precision(result.pooled);
  result.spam_recall = rp.recall;
  result.spam_precision = rp.precision;
  return result;
}

inline void validate(const ClassifierConfig& config, double lambda, std::size_t m) {
  require_lambda(lambda);
  if (m == 0) fail(ErrorKind::config, "attribute count m must be at least 1");
  if (config.kind == ClassifierKind::memory_based && config.k == 0) {
    fail(ErrorKind::config, "k must be at least 1");
  }
}

}  // namespace detail

// Per fold: rank attributes on the training part, keep the top m, train on
// the training part, classify the held-out part. WAcc is averaged over folds
// and TCR is the whole-corpus baseline WErr over the mean WErr.
inline AggregateResult cross_validate(const Corpus& corpus, const ClassifierConfig& config,
                                      double lambda, std::size_t m, const FoldPlan& plan) {
  detail::validate(config, lambda, m);
  const DecisionPolicy policy(lambda);
  const auto folds = detail::prepare_folds(corpus, plan);
  std::vector<ConfusionCounts> counts(folds.size());
  detail::parallel_for(folds.size(), [&](std::size_t f) {
    counts[f] = detail::evaluate_fold(corpus, folds[f], config, policy, m);
  });
  return detail::aggregate(corpus, config, lambda, m, std::move(counts));
}

struct AttributeRange {
  std::size_t from = 50;
  std::size_t to = 700;
  std::size_t step = 50;

  std::vector<std::size_t> values() const {
    if (from == 0 || step == 0 || to < from) {
      fail(ErrorKind::config, "invalid attribute range " + std::to_string(from) + ":" +
                                  std::to_string(to) + ":" + std::to_string(step));
    }
    std::vector<std::size_t> out;
    for (std::size_t m = from; m <= to; m += step) out.push_back(m);
    return out;
  }
};

// One result per m, all on the same fold plan. Fold rankings are computed
// once and truncated per m.
inline std::vector<AggregateResult> sweep_attributes(const Corpus& corpus,
                                                     const ClassifierConfig& config,
                                                     double lambda, const AttributeRange& range,
                                                     const FoldPlan& plan) {
  const auto ms = range.values();
  for (const auto m : ms) detail::validate(config, lambda, m);
  const DecisionPolicy policy(lambda);
  const auto folds = detail::prepare_folds(corpus, plan);
  const std::size_t k = folds.size();
  std::vector<ConfusionCounts> counts(ms.size() * k);
  detail::parallel_for(counts.size(), [&](std::size_t job) {
    counts[job] = detail::evaluate_fold(corpus, folds[job % k], config, policy, ms[job / k]);
  });
  std::vector<AggregateResult> results;
  results.reserve(ms.size());
  for (std::size_t p = 0; p < ms.size(); ++p) {
    std::vector<ConfusionCounts> point(counts.begin() + static_cast<std::ptrdiff_t>(p * k),
                                       counts.begin() + static_cast<std::ptrdiff_t>((p + 1) * k));
    results.push_back(detail::aggregate(corpus, config, lambda, ms[p], std::move(point)));
  }
  return results;
}

struct TestResult {
  double t_statistic = 0;  // +/- infinity for zero-variance nonzero differences
  std::size_t degrees_of_freedom = 0;
  double critical_value = 0;
  bool significant_at_05 = false;
};

// One-tailed critical values of Student's t at alpha = 0.05, df = 1..30.
// Larger df use the df = 30 entry, which is slightly conservative.
inline double t_critical_05(std::size_t df) {
  static constexpr std::array<double, 30> table = {
      6.314, 2.920, 2.353, 2.132, 2.015, 1.943, 1.895, 1.860, 1.833, 1.812,
      1.796, 1.782, 1.771, 1.761, 1.753, 1.746, 1.740, 1.734, 1.729, 1.725,
      1.721, 1.717, 1.714, 1.711, 1.708, 1.706, 1.703, 1.701, 1.699, 1.697};
  if (df == 0) fail(ErrorKind::logic, "t distribution needs at least one degree of freedom");
  return table[std::min<std::size_t>(df, table.size()) - 1];
}

// Paired test of H1: mean(a - b) > 0.
inline TestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::input, "paired samples differ in length");
  const std::size_t n = a.size();
  if (n < 2) fail(ErrorKind::input, "paired t-test needs at least two pairs");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0;
  for (const double x : d) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  // Differences that agree to within rounding noise (e.g. a = b + 0.01 on
  // every fold) count as zero variance.
  double scale = 0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  const bool zero_variance = sd <= 16 * std::numeric_limits<double>::epsilon() * scale;

  TestResult result;
  result.degrees_of_freedom = n - 1;
  result.critical_value = t_critical_05(result.degrees_of_freedom);
  if (zero_variance) {
    result.t_statistic = mean > 0 ? infinity : mean < 0 ? -infinity : 0.0;
  } else {
    result.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
  }
  result.significant_at_05 = result.t_statistic > result.critical_value;
  return result;
}

}  // namespace spamfilter
