#pragma once

// Linear SVM: L1-loss (hinge) dual coordinate descent with a regularized bias
// feature. Sample order is shuffled every epoch from a seeded generator, so a
// fixed seed and data order reproduce the weights bit for bit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "tcensus/error.hpp"
#include "tcensus/features.hpp"
#include "tcensus/layout.hpp"

namespace tcensus {

struct SvmConfig {
  double c = 1.0;
  /// Stop once the spread of projected gradients falls below this.
  double tolerance = 1e-6;
  int max_epochs = 2000;
  std::uint64_t seed = 42;
  /// Value of the constant feature that carries the bias.
  double bias_feature = 1.0;
};

/// Training rows stored sparsely; labels are +1 / -1.
class SparseDataset {
 public:
  struct Entry {
    std::uint32_t index;
    double value;
  };

  explicit SparseDataset(std::size_t dimension = 0) : dimension_(dimension) {}

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return labels_.size(); }
  int label(std::size_t i) const noexcept { return labels_[i]; }
  std::span<const int> labels() const noexcept { return labels_; }

  std::span<const Entry> row(std::size_t i) const noexcept {
    return {entries_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  void add(std::span<const double> dense, int label) {
    if (dimension_ == 0 && labels_.empty()) dimension_ = dense.size();
    if (dense.size() != dimension_) {
      throw Error(ErrorCode::InvalidConfig, "feature dimension mismatch in training set");
    }
    if (label != 1 && label != -1) throw Error(ErrorCode::InvalidConfig, "labels must be +1 or -1");
    for (std::size_t k = 0; k < dense.size(); ++k) {
      if (dense[k] != 0.0) entries_.push_back({static_cast<std::uint32_t>(k), dense[k]});
    }
    offsets_.push_back(entries_.size());
    labels_.push_back(label);
  }

  double dot(std::size_t i, std::span<const double> w) const noexcept {
    double s = 0.0;
    for (const Entry& e : row(i)) s += e.value * w[e.index];
    return s;
  }

 private:
  std::size_t dimension_;
  std::vector<Entry> entries_;
  std::vector<std::size_t> offsets_{0};
  std::vector<int> labels_;
};

struct LinearSolution {
  std::vector<double> weights;
  double bias = 0.0;
  int epochs = 0;
  bool converged = false;

  double score(std::span<const double> x) const noexcept {
    double s = bias;
    for (std::size_t k = 0; k < weights.size(); ++k) s += weights[k] * x[k];
    return s;
  }
};

inline LinearSolution solve_linear_svm(const SparseDataset& data, const SvmConfig& cfg) {
  bool has_pos = false;
  bool has_neg = false;
  for (const int y : data.labels()) (y > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) {
    throw Error(ErrorCode::DegenerateData, "linear SVM needs examples of both classes");
  }
  if (!(cfg.c > 0.0) || !(cfg.tolerance > 0.0) || cfg.max_epochs < 1) {
    throw Error(ErrorCode::InvalidConfig, "invalid SVM configuration");
  }

  const std::size_t n = data.size();
  const double bias_sq = cfg.bias_feature * cfg.bias_feature;
  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = bias_sq;
    for (const auto& e : data.row(i)) s += e.value * e.value;
    qd[i] = s;
  }

  LinearSolution sol;
  sol.weights.assign(data.dimension(), 0.0);
  double w_bias = 0.0;
  std::vector<double> alpha(n, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.seed);

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (const std::size_t i : order) {
      const double y = data.label(i);
      const double g = y * (data.dot(i, sol.weights) + w_bias * cfg.bias_feature) - 1.0;
      double pg = g;
      if (alpha[i] == 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] == cfg.c) {
        pg = std::max(g, 0.0);
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (std::abs(pg) > 1e-12) {
        const double old = alpha[i];
        alpha[i] = std::clamp(old - g / qd[i], 0.0, cfg.c);
        const double d = (alpha[i] - old) * y;
        for (const auto& e : data.row(i)) sol.weights[e.index] += d * e.value;
        w_bias += d * cfg.bias_feature;
      }
    }
    sol.epochs = epoch + 1;
    if (pg_max - pg_min < cfg.tolerance) {
      sol.converged = true;
      break;
    }
  }
  sol.bias = w_bias * cfg.bias_feature;
  return sol;
}

inline LinearSolution solve_linear_svm(std::span<const FeatureVector> features,
                                       std::span<const int> labels, const SvmConfig& cfg) {
  if (features.size() != labels.size()) {
    throw Error(ErrorCode::InvalidConfig, "feature and label counts differ");
  }
  SparseDataset data(features.empty() ? 0 : features.front().size());
  for (std::size_t i = 0; i < features.size(); ++i) data.add(features[i], labels[i]);
  return solve_linear_svm(data, cfg);
}

struct TrainingInfo {
  std::uint64_t seed = 0;
  double c = 1.0;
  int rounds = 1;
  int epochs = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t hard_negatives = 0;

  bool operator==(const TrainingInfo&) const = default;
};

/// Trained weights bound to the layout whose features they score.
struct LinearModel {
  BlockLayout layout;
  bool normalized = false;
  std::vector<double> weights;
  double bias = 0.0;
  TrainingInfo info;

  double score(std::span<const double> features) const {
    if (features.size() != weights.size()) {
      throw Error(ErrorCode::InvalidConfig, "feature vector does not match the model layout");
    }
    double s = bias;
    for (std::size_t k = 0; k < weights.size(); ++k) s += weights[k] * features[k];
    return s;
  }

  bool operator==(const LinearModel&) const = default;
};

inline LinearModel train_linear_svm(const SparseDataset& data, const BlockLayout& layout,
                                    const SvmConfig& cfg, bool normalized = false) {
  if (data.dimension() != layout.dimension()) {
    throw Error(ErrorCode::InvalidConfig, "training features do not match the layout dimension");
  }
  LinearSolution sol = solve_linear_svm(data, cfg);
  LinearModel model{layout, normalized, std::move(sol.weights), sol.bias, {}};
  model.info.seed = cfg.seed;
  model.info.c = cfg.c;
  model.info.epochs = sol.epochs;
  for (const int y : data.labels()) ++(y > 0 ? model.info.positives : model.info.negatives);
  return model;
}

inline LinearModel train_linear_svm(std::span<const FeatureVector> features,
                                    std::span<const int> labels, const BlockLayout& layout,
                                    const SvmConfig& cfg, bool normalized = false) {
  if (features.size() != labels.size()) {
    throw Error(ErrorCode::InvalidConfig, "feature and label counts differ");
  }
  SparseDataset data(layout.dimension());
  for (std::size_t i = 0; i < features.size(); ++i) data.add(features[i], labels[i]);
  return train_linear_svm(data, layout, cfg, normalized);
}

}  // namespace tcensus
