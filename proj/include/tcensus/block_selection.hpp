#pragma once

// Per-position choice among the base block and its four one-sided extensions:
// a block-local linear SVM is trained for every candidate structure and the
// one with the best held-out accuracy is kept.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tcensus/error.hpp"
#include "tcensus/features.hpp"
#include "tcensus/layout.hpp"
#include "tcensus/parallel.hpp"
#include "tcensus/svm.hpp"

namespace tcensus {

struct BlockSelectionConfig {
  std::vector<BlockVariant> candidates{kAllVariants.begin(), kAllVariants.end()};
  double holdout_fraction = 0.2;
  std::uint64_t split_seed = 7;
  SvmConfig svm;
  ExtractOptions extract;
};

struct HoldoutSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> holdout;
};

/// Stratified split: each class contributes round(fraction * n) (at least 1) to the holdout.
inline HoldoutSplit stratified_split(std::span<const int> labels, double fraction,
                                     std::uint64_t seed) {
  HoldoutSplit split;
  std::mt19937_64 rng(seed);
  for (const int cls : {1, -1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) idx.push_back(i);
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_hold = std::clamp<std::size_t>(
        static_cast<std::size_t>(fraction * static_cast<double>(idx.size()) + 0.5), 1,
        idx.size() - 1);
    split.holdout.insert(split.holdout.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_hold));
    split.train.insert(split.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_hold), idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.holdout.begin(), split.holdout.end());
  return split;
}

struct CandidateScore {
  BlockVariant variant;
  double accuracy;
};

struct BlockSelection {
  BlockLayout layout;
  /// Held-out accuracy of every evaluated candidate, per grid position.
  std::vector<std::vector<CandidateScore>> scores;
};

/// `grid` supplies the base rect of every position (its own variants are ignored).
inline BlockSelection select_local_optimal_blocks(std::span<const GrayImage> windows,
                                                  std::span<const int> labels,
                                                  const BlockLayout& grid,
                                                  const BlockSelectionConfig& cfg = {}) {
  if (windows.size() != labels.size()) {
    throw Error(ErrorCode::InvalidConfig, "window and label counts differ");
  }
  const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const auto n_neg = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), -1));
  if (n_pos < 2 || n_neg < 2) {
    throw Error(ErrorCode::InsufficientData, "block selection needs at least 2 windows per class");
  }
  if (cfg.candidates.empty()) throw Error(ErrorCode::InvalidConfig, "no candidate structures");

  std::vector<BlockVariant> candidates;
  for (const BlockVariant v : kAllVariants) {
    if (std::find(cfg.candidates.begin(), cfg.candidates.end(), v) != cfg.candidates.end()) {
      candidates.push_back(v);
    }
  }

  std::vector<LabelImages> label_images(windows.size());
  parallel_for(windows.size(), [&](std::size_t i) {
    if (windows[i].width() != grid.window_width || windows[i].height() != grid.window_height) {
      throw Error(ErrorCode::InvalidConfig, "training window does not match the layout window size");
    }
    label_images[i] = compute_labels(windows[i], grid.descriptor);
  });
  const HoldoutSplit split = stratified_split(labels, cfg.holdout_fraction, cfg.split_seed);

  BlockSelection result{grid, std::vector<std::vector<CandidateScore>>(grid.blocks.size())};
  parallel_for(grid.blocks.size(), [&](std::size_t b) {
    const Rect base = grid.blocks[b].rects.front();
    double best_acc = -1.0;
    ExtensionBlockStructure best = make_structure(base, BlockVariant::Base);
    for (const BlockVariant v : candidates) {
      const ExtensionBlockStructure s = make_structure(base, v);
      if (!structure_fits(s, grid.window_width, grid.window_height)) continue;
      BlockLayout local{grid.window_width, grid.window_height, grid.descriptor, {s}};
      std::vector<FeatureVector> feats(windows.size());
      for (std::size_t i = 0; i < windows.size(); ++i) {
        feats[i] = extract_features(label_images[i], local, 0, 0, cfg.extract);
      }
      SparseDataset train(local.dimension());
      for (const std::size_t i : split.train) train.add(feats[i], labels[i]);
      const LinearSolution sol = solve_linear_svm(train, cfg.svm);
      std::size_t correct = 0;
      for (const std::size_t i : split.holdout) {
        const double sc = sol.score(feats[i]);
        if ((sc > 0.0 ? 1 : -1) == labels[i]) ++correct;
      }
      const double acc = static_cast<double>(correct) / static_cast<double>(split.holdout.size());
      result.scores[b].push_back({v, acc});
      if (acc > best_acc) {
        best_acc = acc;
        best = s;
      }
    }
    result.layout.blocks[b] = best;
  });
  return result;
}

}  // namespace tcensus
