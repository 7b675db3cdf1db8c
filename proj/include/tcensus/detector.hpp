#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

#include "tcensus/error.hpp"
#include "tcensus/fast_score.hpp"
#include "tcensus/features.hpp"
#include "tcensus/image.hpp"
#include "tcensus/layout.hpp"
#include "tcensus/parallel.hpp"
#include "tcensus/svm.hpp"

namespace tcensus {

struct PyramidConfig {
  double factor = 1.0905077326652577;  // 2^(1/8)
  int min_level = 0;
  /// Negative means no upper bound beyond the window fitting.
  int max_level = -1;
};

struct PyramidLevel {
  int level = 0;
  double scale = 1.0;
  GrayImage image;
};

inline double level_scale(const PyramidConfig& cfg, int level) { return std::pow(cfg.factor, level); }

/// Level k of the pyramid: floor(original / factor^k), resampled bilinearly.
inline GrayImage level_image(const GrayImage& img, const PyramidConfig& cfg, int level) {
  if (level == 0) return img;
  const double s = level_scale(cfg, level);
  return resize_bilinear(img, static_cast<int>(std::floor(img.width() / s + 1e-9)),
                         static_cast<int>(std::floor(img.height() / s + 1e-9)), s, s);
}

/// Level k is floor(original / factor^k), resampled bilinearly; levels the
/// window no longer fits are dropped.
inline std::vector<PyramidLevel> build_pyramid(const GrayImage& img, int window_width,
                                               int window_height, const PyramidConfig& cfg) {
  if (!(cfg.factor > 1.0) || cfg.min_level < 0) {
    throw Error(ErrorCode::InvalidConfig, "pyramid factor must exceed 1");
  }
  std::vector<PyramidLevel> levels;
  for (int k = cfg.min_level; cfg.max_level < 0 || k <= cfg.max_level; ++k) {
    const double s = level_scale(cfg, k);
    const int w = static_cast<int>(std::floor(img.width() / s + 1e-9));
    const int h = static_cast<int>(std::floor(img.height() / s + 1e-9));
    if (w < window_width || h < window_height) break;
    levels.push_back({k, s, level_image(img, cfg, k)});
  }
  return levels;
}

struct Detection {
  Rect box;
  double score = 0.0;
  int level = 0;

  bool operator==(const Detection&) const = default;
};

/// Nearest integer, ties toward negative infinity.
inline int round_half_down(double v) { return static_cast<int>(std::ceil(v - 0.5)); }

inline Rect map_to_original(int x, int y, int window_width, int window_height, double scale) {
  return {round_half_down(y * scale), round_half_down(x * scale),
          round_half_down(window_height * scale), round_half_down(window_width * scale)};
}

/// Score descending; ties by (level, top, left).
inline bool detection_order(const Detection& a, const Detection& b) {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.level, a.box.top, a.box.left) < std::tie(b.level, b.box.top, b.box.left);
}

enum class ScoringPath { Fast, Naive };

struct ScanOptions {
  int stride = 4;
  double threshold = 0.0;
  ScoringPath path = ScoringPath::Fast;
};

struct WindowScore {
  int x;
  int y;
  double score;
};

/// Scores of every stride-lattice origin of one image, row-major.
inline std::vector<WindowScore> score_lattice(const GrayImage& img, const LinearModel& model,
                                              const ScanOptions& opts) {
  const BlockLayout& layout = model.layout;
  if (opts.stride < 1) throw Error(ErrorCode::InvalidConfig, "scan stride must be at least 1");
  if (img.width() < layout.window_width || img.height() < layout.window_height) {
    throw Error(ErrorCode::WindowTooLarge, "detection window does not fit the image");
  }
  const LabelImages labels = compute_labels(img, layout.descriptor);
  std::vector<WindowScore> out;
  if (opts.path == ScoringPath::Fast) {
    const ScanScorer scorer(model, labels);
    for (int y = 0; y < scorer.origins_y(); y += opts.stride) {
      for (int x = 0; x < scorer.origins_x(); x += opts.stride) out.push_back({x, y, scorer.score(x, y)});
    }
  } else {
    for (int y = 0; y + layout.window_height <= img.height(); y += opts.stride) {
      for (int x = 0; x + layout.window_width <= img.width(); x += opts.stride) {
        out.push_back({x, y, naive_window_score(model, labels, x, y)});
      }
    }
  }
  return out;
}

/// Windows of one pyramid level scoring above the threshold, boxes in original coordinates.
inline std::vector<Detection> scan_scale(const GrayImage& level_image, int level, double scale,
                                         const LinearModel& model, const ScanOptions& opts) {
  std::vector<Detection> out;
  for (const WindowScore& w : score_lattice(level_image, model, opts)) {
    if (w.score > opts.threshold) {
      out.push_back({map_to_original(w.x, w.y, model.layout.window_width,
                                     model.layout.window_height, scale),
                     w.score, level});
    }
  }
  return out;
}

inline double iou(const Rect& a, const Rect& b) {
  const int ix = std::max(0, std::min(a.right(), b.right()) - std::max(a.left, b.left));
  const int iy = std::max(0, std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top));
  const double inter = static_cast<double>(ix) * iy;
  const double uni = static_cast<double>(a.width) * a.height + static_cast<double>(b.width) * b.height - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

/// Greedy suppression: keep the best remaining box, drop boxes with IoU above the threshold.
inline std::vector<Detection> nms(std::vector<Detection> dets, double overlap_threshold) {
  if (overlap_threshold < 0.0 || overlap_threshold >= 1.0) {
    throw Error(ErrorCode::InvalidConfig, "NMS overlap threshold must be in [0, 1)");
  }
  std::sort(dets.begin(), dets.end(), detection_order);
  std::vector<Detection> kept;
  for (const Detection& d : dets) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return iou(k.box, d.box) > overlap_threshold;
    });
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

struct DetectConfig {
  PyramidConfig pyramid;
  ScanOptions scan;
  double nms_iou = 0.5;
};

inline std::vector<Detection> detect(const GrayImage& img, const LinearModel& model,
                                     const DetectConfig& cfg = {}) {
  const auto levels =
      build_pyramid(img, model.layout.window_width, model.layout.window_height, cfg.pyramid);
  std::vector<std::vector<Detection>> per_level(levels.size());
  parallel_for(levels.size(), [&](std::size_t i) {
    per_level[i] = scan_scale(levels[i].image, levels[i].level, levels[i].scale, model, cfg.scan);
  });
  std::vector<Detection> all;
  for (auto& v : per_level) all.insert(all.end(), v.begin(), v.end());
  return nms(std::move(all), cfg.nms_iou);
}

}  // namespace tcensus
