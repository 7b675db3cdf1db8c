#pragma once

// Two-round training: positives against randomly sampled negative windows,
// then the first model scans every negative image and its false positives
// (hardest first, capped) join the negatives for a second round.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "tcensus/detector.hpp"
#include "tcensus/error.hpp"
#include "tcensus/features.hpp"
#include "tcensus/layout.hpp"
#include "tcensus/parallel.hpp"
#include "tcensus/sampling.hpp"
#include "tcensus/svm.hpp"

namespace tcensus {

struct BootstrapConfig {
  SvmConfig svm;
  ExtractOptions extract;
  std::size_t negative_windows = 5000;
  std::uint64_t sampling_seed = 42;
  std::size_t hard_negative_cap = 5000;
  double mining_threshold = 0.0;
  PyramidConfig pyramid;
  int scan_stride = 4;
};

struct MinedWindow {
  double score;
  std::size_t image;
  int level;
  int x;
  int y;

  bool operator==(const MinedWindow&) const = default;
};

struct BootstrapResult {
  LinearModel first_round;
  LinearModel model;
  std::vector<MinedWindow> mined;
};

/// Windows of the negative images that `model` scores above the threshold,
/// hardest first, at most `cap`.
inline std::vector<MinedWindow> mine_hard_negatives(std::span<const GrayImage> negative_images,
                                                    const LinearModel& model,
                                                    const BootstrapConfig& cfg) {
  if (cfg.hard_negative_cap == 0) return {};
  std::vector<std::vector<MinedWindow>> per_image(negative_images.size());
  const ScanOptions scan{cfg.scan_stride, cfg.mining_threshold, ScoringPath::Fast};
  parallel_for(negative_images.size(), [&](std::size_t i) {
    const auto levels = build_pyramid(negative_images[i], model.layout.window_width,
                                      model.layout.window_height, cfg.pyramid);
    for (const PyramidLevel& lv : levels) {
      for (const WindowScore& w : score_lattice(lv.image, model, scan)) {
        if (w.score > cfg.mining_threshold) per_image[i].push_back({w.score, i, lv.level, w.x, w.y});
      }
    }
  });
  std::vector<MinedWindow> all;
  for (auto& v : per_image) all.insert(all.end(), v.begin(), v.end());
  const auto hardest_first = [](const MinedWindow& a, const MinedWindow& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.image, a.level, a.y, a.x) < std::tie(b.image, b.level, b.y, b.x);
  };
  const std::size_t keep = std::min(cfg.hard_negative_cap, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), hardest_first);
  all.resize(keep);
  return all;
}

/// Feature vectors of mined windows, in the order given.
inline std::vector<FeatureVector> mined_features(std::span<const GrayImage> negative_images,
                                                 std::span<const MinedWindow> mined,
                                                 const BlockLayout& layout,
                                                 const PyramidConfig& pyramid,
                                                 const ExtractOptions& extract) {
  std::map<std::pair<std::size_t, int>, std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < mined.size(); ++k) groups[{mined[k].image, mined[k].level}].push_back(k);
  std::vector<std::pair<std::pair<std::size_t, int>, std::vector<std::size_t>>> work(groups.begin(), groups.end());
  std::vector<FeatureVector> out(mined.size());
  parallel_for(work.size(), [&](std::size_t g) {
    const auto& [key, members] = work[g];
    const GrayImage level_img = level_image(negative_images[key.first], pyramid, key.second);
    const LabelImages labels = compute_labels(level_img, layout.descriptor);
    for (const std::size_t k : members) {
      out[k] = extract_features(labels, layout, mined[k].x, mined[k].y, extract);
    }
  });
  return out;
}

inline BootstrapResult bootstrap_train(std::span<const GrayImage> positives,
                                       std::span<const GrayImage> negative_images,
                                       const BlockLayout& layout, const BootstrapConfig& cfg) {
  layout.validate();
  if (positives.empty()) throw Error(ErrorCode::DegenerateData, "no positive windows");
  for (const GrayImage& p : positives) {
    if (p.width() != layout.window_width || p.height() != layout.window_height) {
      throw Error(ErrorCode::InvalidConfig, "positive window does not match the layout window size");
    }
  }
  const bool any_usable = std::any_of(negative_images.begin(), negative_images.end(), [&](const GrayImage& img) {
    return img.width() >= layout.window_width && img.height() >= layout.window_height;
  });
  if (!any_usable) throw Error(ErrorCode::NoNegatives, "no negative image can hold a window");
  const WindowSample sample = sample_windows(negative_images, cfg.negative_windows,
                                             layout.window_width, layout.window_height,
                                             cfg.sampling_seed);
  if (sample.windows.empty()) throw Error(ErrorCode::NoNegatives, "negative sampling produced no windows");

  std::vector<FeatureVector> pos_feats(positives.size());
  std::vector<FeatureVector> neg_feats(sample.windows.size());
  parallel_for(positives.size(), [&](std::size_t i) { pos_feats[i] = extract_window(positives[i], layout, cfg.extract); });
  parallel_for(sample.windows.size(), [&](std::size_t i) {
    neg_feats[i] = extract_window(sample.windows[i], layout, cfg.extract);
  });

  SparseDataset data(layout.dimension());
  for (const auto& f : pos_feats) data.add(f, 1);
  for (const auto& f : neg_feats) data.add(f, -1);

  BootstrapResult result;
  result.first_round = train_linear_svm(data, layout, cfg.svm, cfg.extract.normalize);
  result.mined = mine_hard_negatives(negative_images, result.first_round, cfg);
  for (const auto& f : mined_features(negative_images, result.mined, layout, cfg.pyramid, cfg.extract)) {
    data.add(f, -1);
  }
  result.model = train_linear_svm(data, layout, cfg.svm, cfg.extract.normalize);
  result.model.info.rounds = 2;
  result.model.info.hard_negatives = result.mined.size();
  return result;
}

}  // namespace tcensus
