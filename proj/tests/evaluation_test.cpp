#include <algorithm>
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tcensus/evaluation.hpp"

namespace tcensus {
namespace {

using V = std::vector<double>;

TEST(Hik, Identities) {
  const V m{1, 2, 3};
  EXPECT_EQ(hik(m, m), 1.0);
  EXPECT_EQ(hik(m, V{3, 2, 1}), 2.0 / 3.0);
  EXPECT_EQ(hik(m, V{5, 2, 9}), 1.0);
  EXPECT_EQ(hik(V{3, 2, 1}, V{1, 2, 3}), 2.0 / 3.0);
}

TEST(Hik, Asymmetric) {
  const V m{1, 1};
  const V n{2, 2};
  EXPECT_EQ(hik(m, n), 1.0);
  EXPECT_EQ(hik(n, m), 0.5);
}

TEST(Hik, Errors) {
  try {
    (void)hik(V{0, 0}, V{1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyReference);
  }
  EXPECT_THROW((void)hik(V{1}, V{1, 2}), Error);
}

TEST(Hik, RangeAndMonotoneInScale) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    V m(8);
    V n(8);
    for (auto& v : m) v = u(rng);
    for (auto& v : n) v = u(rng);
    const double h = hik(m, n);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, 1.0);
    double prev = -1.0;
    for (const double c : {0.0, 0.25, 0.5, 1.0, 2.0, 10.0}) {
      V cn = n;
      for (auto& v : cn) v *= c;
      const double hc = hik(m, cn);
      EXPECT_GE(hc, prev);
      prev = hc;
    }
  }
}

TEST(DiffScore, DuplicateAndIdenticalSets) {
  const V s{1, 2, 3};
  const std::vector<FeatureVector> same{{0, 0, 1}, s};
  const std::vector<FeatureVector> other{{3, 2, 1}, {0, 5, 0}};
  const auto d = diff_score(s, same, other);
  EXPECT_EQ(d.best_same, 1u);
  EXPECT_DOUBLE_EQ(d.diff, 1.0 - 2.0 / 3.0);
  EXPECT_EQ(diff_score(s, other, other).diff, 0.0);
  EXPECT_THROW((void)diff_score(s, {}, other), Error);
}

/// Exhaustive arg-max by hand over a 3-vector toy set.
TEST(DiffScore, ToySetByHand) {
  const V s{2, 1, 1};
  const std::vector<FeatureVector> same{{1, 1, 0}, {2, 0, 2}, {0, 1, 1}};
  const std::vector<FeatureVector> other{{0, 0, 4}, {1, 2, 1}};
  // hik(s, same): (1+1+0)/4 = .5, (2+0+1)/4 = .75, (0+1+1)/4 = .5
  // hik(s, other): (0+0+1)/4 = .25, (1+1+1)/4 = .75
  const auto d = diff_score(s, same, other);
  EXPECT_EQ(d.best_same, 1u);
  EXPECT_EQ(d.best_other, 1u);
  EXPECT_EQ(d.diff, 0.0);
}

TEST(DiffScore, FirstIndexWinsTies) {
  const V s{1, 1};
  const std::vector<FeatureVector> same{{1, 0}, {0, 1}};
  const std::vector<FeatureVector> other{{5, 5}, {1, 1}};
  const auto d = diff_score(s, same, other);
  EXPECT_EQ(d.best_same, 0u);
  EXPECT_EQ(d.best_other, 0u);
}

LabeledFeatureSet clusters(std::size_t per_class, bool random_labels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  LabeledFeatureSet set;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const bool first = random_labels || i < per_class;
    FeatureVector f(6);
    for (std::size_t k = 0; k < 6; ++k) {
      const double centre = first ? (k < 3 ? 5.0 : 1.0) : (k < 3 ? 1.0 : 5.0);
      f[k] = std::max(0.01, centre + noise(rng));
    }
    set.features.push_back(std::move(f));
    set.labels.push_back(i < per_class ? 1 : -1);
  }
  if (random_labels) std::shuffle(set.labels.begin(), set.labels.end(), rng);
  return set;
}

TEST(DiffNegativeFraction, SeparatedClustersAreZero) {
  const auto set = clusters(50, false, 2);
  EXPECT_EQ(diff_negative_fraction(set, 1), 0.0);
  EXPECT_EQ(diff_negative_fraction(set, -1), 0.0);
  for (const auto& d : diff_scores(set, 1)) {
    EXPECT_GE(d.diff, -1.0);
    EXPECT_LE(d.diff, 1.0);
    EXPECT_EQ(set.labels[d.best_same], 1);
    EXPECT_EQ(set.labels[d.best_other], -1);
  }
}

// Saturated intersections tie at Diff == 0, so only the sign balance is checked.
TEST(DiffNegativeFraction, RandomLabelsSignBalanced) {
  const auto set = clusters(500, true, 3);
  const auto diffs = diff_scores(set, 1);
  const auto neg = std::count_if(diffs.begin(), diffs.end(), [](const DiffScore& d) { return d.diff < 0.0; });
  const auto pos = std::count_if(diffs.begin(), diffs.end(), [](const DiffScore& d) { return d.diff > 0.0; });
  const double n = static_cast<double>(diffs.size());
  EXPECT_NEAR(static_cast<double>(neg) / n, static_cast<double>(pos) / n, 0.1);
  EXPECT_DOUBLE_EQ(diff_negative_fraction(set, 1), 100.0 * static_cast<double>(neg) / n);
}

TEST(DiffNegativeFraction, SignPatternInvariantUnderGlobalScale) {
  auto set = clusters(40, true, 4);
  const auto before = diff_scores(set, 1);
  for (auto& f : set.features) {
    for (auto& v : f) v *= 3.5;
  }
  const auto after = diff_scores(set, 1);
  ASSERT_EQ(before.size(), after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_EQ(before[i].best_same, after[i].best_same);
    EXPECT_EQ(before[i].best_other, after[i].best_other);
    EXPECT_EQ(before[i].diff < 0, after[i].diff < 0);
  }
}

TEST(DiffNegativeFraction, NeedsTwoMembers) {
  LabeledFeatureSet set;
  set.features = {{1, 1}, {2, 2}};
  set.labels = {1, -1};
  EXPECT_THROW((void)diff_negative_fraction(set, 1), Error);
}

TEST(Roc, HandExample) {
  const V pos{0.9, 0.8, 0.7, 0.4, 0.2};
  const V neg{0.6, 0.5, 0.3, 0.1, 0.05};
  const auto curve = roc(pos, neg);
  EXPECT_DOUBLE_EQ(detection_rate_at_fpr(curve, 0.2), 0.6);
  EXPECT_DOUBLE_EQ(detection_rate_at_fpr(curve, 0.0), 0.6);
  EXPECT_DOUBLE_EQ(detection_rate_at_fpr(curve, 0.4), 0.8);
  EXPECT_DOUBLE_EQ(detection_rate_at_fpr(curve, 0.6), 1.0);
  EXPECT_DOUBLE_EQ(detection_rate_at_fpr(curve, 1.0), 1.0);
  EXPECT_EQ(curve.points.front().fpr, 0.0);
  EXPECT_EQ(curve.points.back().fpr, 1.0);
  EXPECT_EQ(curve.points.back().detection_rate, 1.0);
}

TEST(Roc, PerfectSeparation) {
  const auto curve = roc(V{5, 6, 7}, V{1, 2, 3});
  for (const double f : {1e-3, 0.1, 0.5, 1.0}) EXPECT_EQ(detection_rate_at_fpr(curve, f), 1.0);
}

TEST(Roc, IdenticalDistributionsFollowDiagonal) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  V pos(4000);
  V neg(4000);
  for (auto& v : pos) v = n(rng);
  for (auto& v : neg) v = n(rng);
  const auto curve = roc(pos, neg);
  for (const auto& p : curve.points) EXPECT_NEAR(p.detection_rate, p.fpr, 0.05);
}

TEST(Roc, MonotoneAndTiesHandled) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> u(0, 10);
  V pos(200);
  V neg(300);
  for (auto& v : pos) v = u(rng) + 2;
  for (auto& v : neg) v = u(rng);
  const auto curve = roc(pos, neg);
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    EXPECT_GE(curve.points[i].fpr, curve.points[i - 1].fpr);
    EXPECT_GE(curve.points[i].detection_rate, curve.points[i - 1].detection_rate);
    EXPECT_LT(curve.points[i].threshold, curve.points[i - 1].threshold);
  }
  // One point per distinct score plus the origin.
  EXPECT_EQ(curve.points.size(), 14u);
  try {
    (void)roc(V{}, V{1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyScores);
  }
}

}  // namespace
}  // namespace tcensus
