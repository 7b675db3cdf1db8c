#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tcensus/svm.hpp"

namespace tcensus {
namespace {

struct Toy {
  std::vector<FeatureVector> x;
  std::vector<int> y;
};

/// Points drawn uniformly in [-1, 1]^d, kept only when |<h, x>| / |h| >= margin.
Toy separable(std::size_t n, std::size_t dim, double margin, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FeatureVector h(dim);
  for (auto& v : h) v = u(rng);
  double norm = 0.0;
  for (const double v : h) norm += v * v;
  norm = std::sqrt(norm);
  Toy t;
  while (t.x.size() < n) {
    FeatureVector p(dim);
    double dot = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      p[k] = u(rng);
      dot += p[k] * h[k];
    }
    if (std::abs(dot) / norm < margin) continue;
    t.x.push_back(std::move(p));
    t.y.push_back(dot > 0 ? 1 : -1);
  }
  return t;
}

double primal(const Toy& t, std::span<const double> w, double b, double c) {
  double obj = 0.5 * b * b;
  for (const double v : w) obj += 0.5 * v * v;
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    double s = b;
    for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * t.x[i][k];
    obj += c * std::max(0.0, 1.0 - t.y[i] * s);
  }
  return obj;
}

TEST(LinearSvm, AxisToy) {
  const std::vector<FeatureVector> x{{1, 0}, {-1, 0}, {1, 0}, {-1, 0}};
  const std::vector<int> y{1, -1, 1, -1};
  const auto sol = solve_linear_svm(x, y, {});
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_GT(y[i] * sol.score(x[i]), 0.0);
  EXPECT_TRUE(sol.converged);
}

TEST(LinearSvm, SeparableSetIsFit) {
  const Toy t = separable(200, 10, 0.1, 1);
  SvmConfig cfg;
  cfg.c = 100.0;
  const auto sol = solve_linear_svm(t.x, t.y, cfg);
  for (std::size_t i = 0; i < t.x.size(); ++i) EXPECT_GT(t.y[i] * sol.score(t.x[i]), 0.0) << i;
}

TEST(LinearSvm, DuplicatingSamplesKeepsSigns) {
  const Toy t = separable(120, 6, 0.1, 2);
  Toy twice = t;
  twice.x.insert(twice.x.end(), t.x.begin(), t.x.end());
  twice.y.insert(twice.y.end(), t.y.begin(), t.y.end());
  SvmConfig cfg;
  cfg.c = 50.0;
  const auto a = solve_linear_svm(t.x, t.y, cfg);
  const auto b = solve_linear_svm(twice.x, twice.y, cfg);
  for (const auto& p : t.x) EXPECT_EQ(a.score(p) > 0, b.score(p) > 0);
}

TEST(LinearSvm, SolutionIsLocallyOptimal) {
  // Not separable: the hinge terms matter.
  Toy t = separable(150, 5, 0.0, 3);
  for (std::size_t i = 0; i < t.y.size(); i += 7) t.y[i] = -t.y[i];
  const double c = 0.5;
  SvmConfig cfg;
  cfg.c = c;
  cfg.tolerance = 1e-9;
  cfg.max_epochs = 20000;
  const auto sol = solve_linear_svm(t.x, t.y, cfg);
  ASSERT_TRUE(sol.converged);
  const double best = primal(t, sol.weights, sol.bias, c);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int probe = 0; probe < 200; ++probe) {
    std::vector<double> w = sol.weights;
    for (auto& v : w) v += 1e-3 * n(rng);
    const double b = sol.bias + 1e-3 * n(rng);
    EXPECT_GE(primal(t, w, b, c), best - 1e-6);
  }
}

TEST(LinearSvm, DeterministicForSeed) {
  const Toy t = separable(80, 8, 0.05, 5);
  const auto a = solve_linear_svm(t.x, t.y, {});
  const auto b = solve_linear_svm(t.x, t.y, {});
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
  EXPECT_EQ(a.epochs, b.epochs);
}

TEST(LinearSvm, SingleClassThrows) {
  const std::vector<FeatureVector> x{{1, 0}, {2, 0}};
  const std::vector<int> y{1, 1};
  try {
    (void)solve_linear_svm(x, y, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateData);
  }
}

TEST(LinearSvm, BadInputThrows) {
  const std::vector<FeatureVector> x{{1, 0}, {2}};
  EXPECT_THROW((void)solve_linear_svm(x, std::vector<int>{1, -1}, {}), Error);
  const std::vector<FeatureVector> ok{{1, 0}, {-1, 0}};
  EXPECT_THROW((void)solve_linear_svm(ok, std::vector<int>{1, 0}, {}), Error);
  SvmConfig bad;
  bad.c = 0.0;
  EXPECT_THROW((void)solve_linear_svm(ok, std::vector<int>{1, -1}, bad), Error);
}

TEST(LinearModel, TrainingRecordsMetadata) {
  const BlockLayout layout{3, 3, Descriptor::TCentrist, {make_structure({0, 0, 3, 3}, BlockVariant::Base)}};
  std::vector<FeatureVector> x(4, FeatureVector(layout.dimension(), 0.0));
  x[0][0] = 1;
  x[1][0] = 1;
  x[2][1] = 1;
  x[3][1] = 1;
  const std::vector<int> y{1, 1, -1, -1};
  SvmConfig cfg;
  cfg.seed = 9;
  cfg.c = 2.0;
  const auto m = train_linear_svm(x, y, layout, cfg);
  EXPECT_EQ(m.info.seed, 9u);
  EXPECT_EQ(m.info.c, 2.0);
  EXPECT_EQ(m.info.positives, 2u);
  EXPECT_EQ(m.info.negatives, 2u);
  EXPECT_GT(m.score(x[0]), 0.0);
  EXPECT_LT(m.score(x[2]), 0.0);
  EXPECT_THROW((void)m.score(FeatureVector(3)), Error);
  EXPECT_THROW((void)train_linear_svm(std::vector<FeatureVector>(2, FeatureVector(5)), std::vector<int>{1, -1},
                                      layout, cfg),
               Error);
}

}  // namespace
}  // namespace tcensus
