#pragma once

// Reference implementations used only by tests. They recompute quantities the
// slow, obvious way, without sharing code paths with the library.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "spamfilter/spamfilter.hpp"

namespace oracle {

using spamfilter::BinaryVector;
using spamfilter::Corpus;
using spamfilter::Label;
using spamfilter::LabeledVector;

// Direct summation of MI(X;C) for every token, probabilities from enumerating
// (document, attribute value, class) triples, natural log converted to bits.
inline std::map<std::string, double> mutual_information(const Corpus& corpus) {
  std::set<std::string> vocabulary;
  for (const auto& doc : corpus.documents()) vocabulary.insert(doc.tokens.begin(), doc.tokens.end());
  const double n = static_cast<double>(corpus.size());
  std::map<std::string, double> out;
  for (const auto& token : vocabulary) {
    double joint[2][2] = {{0, 0}, {0, 0}};  // [x][c], c = 1 for spam
    for (const auto& doc : corpus.documents()) {
      const int x = std::find(doc.tokens.begin(), doc.tokens.end(), token) != doc.tokens.end();
      const int c = doc.label == Label::spam;
      joint[x][c] += 1.0 / n;
    }
    double mi = 0;
    for (int x = 0; x < 2; ++x) {
      for (int c = 0; c < 2; ++c) {
        const double px = joint[x][0] + joint[x][1];
        const double pc = joint[0][c] + joint[1][c];
        if (joint[x][c] > 0) mi += joint[x][c] * std::log(joint[x][c] / (px * pc)) / std::log(2.0);
      }
    }
    out[token] = mi;
  }
  return out;
}

// Laplace-smoothed Naive Bayes posterior from raw products (no logs).
inline double posterior_spam(const std::vector<LabeledVector>& training, const BinaryVector& x) {
  const std::size_t m = x.size();
  double n[2] = {0, 0};
  std::vector<double> present[2] = {std::vector<double>(m, 0), std::vector<double>(m, 0)};
  for (const auto& [v, label] : training) {
    const int c = label == Label::spam;
    n[c] += 1;
    for (std::size_t i = 0; i < m; ++i) present[c][i] += v[i] ? 1 : 0;
  }
  double joint[2];
  for (int c = 0; c < 2; ++c) {
    joint[c] = n[c] / (n[0] + n[1]);
    for (std::size_t i = 0; i < m; ++i) {
      const double p1 = (present[c][i] + 1) / (n[c] + 2);
      joint[c] *= x[i] ? p1 : 1 - p1;
    }
  }
  return joint[1] / (joint[0] + joint[1]);
}

inline std::size_t hamming(const BinaryVector& a, const BinaryVector& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

// Sort every (distance, index) pair, take the first k distinct distances and
// keep every instance at those distances.
inline std::vector<std::size_t> neighborhood(const std::vector<LabeledVector>& base,
                                             const BinaryVector& query, std::size_t k) {
  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t i = 0; i < base.size(); ++i) all.push_back({hamming(base[i].vector, query), i});
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> distinct;
  for (const auto& [d, i] : all) {
    if (distinct.empty() || distinct.back() != d) distinct.push_back(d);
  }
  if (distinct.size() > k) distinct.resize(k);
  std::vector<std::size_t> members;
  for (const auto& [d, i] : all) {
    if (std::find(distinct.begin(), distinct.end(), d) != distinct.end()) members.push_back(i);
  }
  std::sort(members.begin(), members.end());
  return members;
}

}  // namespace oracle
