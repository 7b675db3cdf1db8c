#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "tcensus/error.hpp"
#include "tcensus/features.hpp"
#include "tcensus/layout.hpp"
#include "tcensus/parallel.hpp"

namespace tcensus {

/// Histogram intersection normalized by the first argument only:
/// sum_i min(M_i, N_i) / sum_i M_i.
inline double hik(std::span<const double> m, std::span<const double> n) {
  if (m.size() != n.size()) throw Error(ErrorCode::InvalidConfig, "histograms differ in length");
  double inter = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    inter += std::min(m[i], n[i]);
    mass += m[i];
  }
  if (!(mass > 0.0)) throw Error(ErrorCode::EmptyReference, "reference histogram has no mass");
  return inter / mass;
}

struct LabeledFeatureSet {
  std::vector<FeatureVector> features;
  std::vector<int> labels;
  Descriptor descriptor = Descriptor::TCentrist;
};

struct DiffScore {
  double diff = 0.0;
  std::size_t best_same = 0;
  std::size_t best_other = 0;
};

namespace detail {

/// Index of the most similar candidate; the first wins ties.
inline std::pair<std::size_t, double> most_similar(
    std::span<const double> s, std::size_t count,
    const std::function<std::span<const double>(std::size_t)>& candidate) {
  std::size_t best = 0;
  double best_sim = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < count; ++j) {
    const double sim = hik(s, candidate(j));
    if (sim > best_sim) {
      best_sim = sim;
      best = j;
    }
  }
  return {best, best_sim};
}

}  // namespace detail

/// hik(s, most similar same-class sample) - hik(s, most similar other-class sample).
/// `same` must not contain s itself.
inline DiffScore diff_score(std::span<const double> s, std::span<const FeatureVector> same,
                            std::span<const FeatureVector> other) {
  if (same.empty() || other.empty()) throw Error(ErrorCode::EmptySet, "similarity sets must be non-empty");
  const auto [in_idx, in_sim] =
      detail::most_similar(s, same.size(), [&](std::size_t j) { return std::span<const double>(same[j]); });
  const auto [out_idx, out_sim] =
      detail::most_similar(s, other.size(), [&](std::size_t j) { return std::span<const double>(other[j]); });
  return {in_sim - out_sim, in_idx, out_idx};
}

/// Diff_s of every member of class `cls`, each compared against the rest of its
/// class and against all other samples. Indices refer to positions in `set`.
inline std::vector<DiffScore> diff_scores(const LabeledFeatureSet& set, int cls) {
  if (set.features.size() != set.labels.size()) {
    throw Error(ErrorCode::InvalidConfig, "feature and label counts differ");
  }
  std::vector<std::size_t> same;
  std::vector<std::size_t> other;
  for (std::size_t i = 0; i < set.labels.size(); ++i) (set.labels[i] == cls ? same : other).push_back(i);
  if (same.size() < 2) throw Error(ErrorCode::EmptySet, "class needs at least 2 members");
  if (other.empty()) throw Error(ErrorCode::EmptySet, "no samples of any other class");

  std::vector<DiffScore> out(same.size());
  parallel_for(same.size(), [&](std::size_t k) {
    const std::span<const double> s = set.features[same[k]];
    std::vector<std::size_t> peers;
    peers.reserve(same.size() - 1);
    for (const std::size_t j : same) {
      if (j != same[k]) peers.push_back(j);
    }
    const auto [in_idx, in_sim] = detail::most_similar(
        s, peers.size(), [&](std::size_t j) { return std::span<const double>(set.features[peers[j]]); });
    const auto [out_idx, out_sim] = detail::most_similar(
        s, other.size(), [&](std::size_t j) { return std::span<const double>(set.features[other[j]]); });
    out[k] = {in_sim - out_sim, peers[in_idx], other[out_idx]};
  });
  return out;
}

/// Percentage of class members whose Diff_s is negative.
inline double diff_negative_fraction(const LabeledFeatureSet& set, int cls) {
  const auto diffs = diff_scores(set, cls);
  const auto neg = std::count_if(diffs.begin(), diffs.end(), [](const DiffScore& d) { return d.diff < 0.0; });
  return 100.0 * static_cast<double>(neg) / static_cast<double>(diffs.size());
}

struct RocPoint {
  double fpr;
  double detection_rate;
  /// Scores >= threshold count as positive.
  double threshold;
};

struct RocCurve {
  std::vector<RocPoint> points;
  std::vector<double> positive_scores;
  std::vector<double> negative_scores;
};

/// Sweeps the threshold down through every distinct score, starting at (0, 0).
inline RocCurve roc(std::span<const double> positive_scores, std::span<const double> negative_scores) {
  if (positive_scores.empty() || negative_scores.empty()) {
    throw Error(ErrorCode::EmptyScores, "ROC needs positive and negative scores");
  }
  RocCurve curve{{}, {positive_scores.begin(), positive_scores.end()},
                 {negative_scores.begin(), negative_scores.end()}};
  std::vector<double> pos = curve.positive_scores;
  std::vector<double> neg = curve.negative_scores;
  std::sort(pos.begin(), pos.end(), std::greater<>());
  std::sort(neg.begin(), neg.end(), std::greater<>());
  const double np = static_cast<double>(pos.size());
  const double nn = static_cast<double>(neg.size());

  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t ip = 0;
  std::size_t in = 0;
  while (ip < pos.size() || in < neg.size()) {
    double t = -std::numeric_limits<double>::infinity();
    if (ip < pos.size()) t = std::max(t, pos[ip]);
    if (in < neg.size()) t = std::max(t, neg[in]);
    while (ip < pos.size() && pos[ip] >= t) ++ip;
    while (in < neg.size() && neg[in] >= t) ++in;
    curve.points.push_back({static_cast<double>(in) / nn, static_cast<double>(ip) / np, t});
  }
  return curve;
}

/// Best detection rate among curve points whose FPR does not exceed `fpr`.
inline double detection_rate_at_fpr(const RocCurve& curve, double fpr) {
  double rate = 0.0;
  for (const RocPoint& p : curve.points) {
    if (p.fpr <= fpr) rate = std::max(rate, p.detection_rate);
  }
  return rate;
}

}  // namespace tcensus
