#pragma once

// Memory-based classification with TiMBL-style neighborhoods: instead of the
// k nearest instances, take every instance at the k smallest distinct
// distances, then vote with legitimate neighbors weighted by lambda.

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "spamfilter/bayes.hpp"
#include "spamfilter/corpus.hpp"
#include "spamfilter/error.hpp"
#include "spamfilter/features.hpp"

namespace spamfilter {

// Number of positions where the two vectors differ.
inline std::size_t overlap_distance(const BinaryVector& a, const BinaryVector& b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::logic, "overlap distance between vectors of different length");
  }
  const auto wa = a.words();
  const auto wb = b.words();
  std::size_t distance = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    distance += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  }
  return distance;
}

class InstanceBase {
 public:
  explicit InstanceBase(std::vector<LabeledVector> instances)
      : instances_(std::move(instances)) {
    if (instances_.empty()) fail(ErrorKind::input, "instance base needs at least one instance");
    width_ = instances_.front().vector.size();
    for (const auto& instance : instances_) {
      if (instance.vector.size() != width_) {
        fail(ErrorKind::logic, "instance vectors differ in length");
      }
    }
  }

  std::size_t size() const noexcept { return instances_.size(); }
  std::size_t width() const noexcept { return width_; }
  const LabeledVector& operator[](std::size_t i) const { return instances_[i]; }
  std::span<const LabeledVector> instances() const noexcept { return instances_; }

 private:
  std::vector<LabeledVector> instances_;
  std::size_t width_ = 0;
};

inline InstanceBase build_instance_base(std::vector<LabeledVector> instances) {
  return InstanceBase(std::move(instances));
}

struct Neighbor {
  std::size_t index;  // position in the instance base
  std::size_t distance;
  Label label;

  bool operator==(const Neighbor&) const = default;
};

struct Neighborhood {
  std::vector<Neighbor> members;            // ascending instance index
  std::vector<std::size_t> distinct_distances;  // ascending, at most k values

  std::size_t count(Label label) const {
    std::size_t n = 0;
    for (const auto& member : members) n += member.label == label;
    return n;
  }
};

namespace detail {

// Largest distance admitted by a k-distance neighborhood, found through a
// histogram over [0, width] since overlap distances are bounded by the width.
inline std::size_t distance_cutoff(std::span<const std::size_t> distances, std::size_t width,
                                   std::size_t k, std::vector<std::size_t>* distinct) {
  std::vector<std::uint8_t> seen(width + 1, 0);
  for (const auto d : distances) seen[d] = 1;
  std::size_t found = 0, cutoff = 0;
  for (std::size_t d = 0; d <= width && found < k; ++d) {
    if (!seen[d]) continue;
    ++found;
    cutoff = d;
    if (distinct) distinct->push_back(d);
  }
  return cutoff;
}

}  // namespace detail

inline Neighborhood k_distance_neighborhood(const InstanceBase& base, const BinaryVector& query,
                                            std::size_t k) {
  if (k == 0) fail(ErrorKind::config, "k must be at least 1");
  std::vector<std::size_t> distances(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    distances[i] = overlap_distance(base[i].vector, query);
  }
  Neighborhood hood;
  const std::size_t cutoff =
      detail::distance_cutoff(distances, base.width(), k, &hood.distinct_distances);
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (distances[i] <= cutoff) hood.members.push_back({i, distances[i], base[i].label});
  }
  return hood;
}

// Spam iff spam_votes > lambda * legit_votes; ties go to legitimate.
inline Label lambda_vote(std::size_t spam_votes, std::size_t legit_votes,
                         const DecisionPolicy& policy) {
  return static_cast<double>(spam_votes) > policy.lambda() * static_cast<double>(legit_votes)
             ? Label::spam
             : Label::legitimate;
}

inline Label classify_mb(const InstanceBase& base, const BinaryVector& query, std::size_t k,
                         const DecisionPolicy& policy) {
  if (k == 0) fail(ErrorKind::config, "k must be at least 1");
  // Per-distance class tallies; no need to materialize the neighborhood.
  const std::size_t width = base.width();
  std::vector<std::size_t> spam_at(width + 1, 0), legit_at(width + 1, 0);
  for (const auto& [vector, label] : base.instances()) {
    const std::size_t d = overlap_distance(vector, query);
    (label == Label::spam ? spam_at : legit_at)[d] += 1;
  }
  std::size_t spam_votes = 0, legit_votes = 0, found = 0;
  for (std::size_t d = 0; d <= width && found < k; ++d) {
    if (spam_at[d] + legit_at[d] == 0) continue;
    ++found;
    spam_votes += spam_at[d];
    legit_votes += legit_at[d];
  }
  return lambda_vote(spam_votes, legit_votes, policy);
}

}  // namespace spamfilter
