#pragma once

// Procedural stand-in data: bright pedestrian-like silhouettes over cluttered
// texture, and clutter-only negatives. Used by the tests, the acceptance
// suite and `tcensus synth`.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcensus/image.hpp"
#include "tcensus/io.hpp"
#include "tcensus/layout.hpp"

namespace tcensus::synthetic {

struct Config {
  int window_width = 36;
  int window_height = 72;
  int negative_width = 160;
  int negative_height = 160;
  /// Random rectangles and ellipses painted into every background.
  int clutter_shapes = 10;
  double pixel_noise = 12.0;
  /// Figures per negative image placed across the image border, so no
  /// window ever contains a whole one.
  int partial_figures = 6;
  /// Whole figures at 40-78% of window scale, too small for any window.
  int small_figures = 2;
  /// Figures too large for the negative image to ever hold one completely.
  int oversized_figures = 1;
};

namespace detail {

inline std::uint8_t clamp_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

inline void paint_ellipse(Raster<double>& img, double cx, double cy, double rx, double ry, double value) {
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - rx)));
  const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(cx + rx)));
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - ry)));
  const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(cy + ry)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double u = (x + 0.5 - cx) / rx;
      const double v = (y + 0.5 - cy) / ry;
      if (u * u + v * v <= 1.0) img.at(x, y) = value;
    }
  }
}

inline void paint_rect(Raster<double>& img, double x0, double y0, double x1, double y1, double value) {
  const int ix0 = std::max(0, static_cast<int>(std::lround(x0)));
  const int ix1 = std::min(img.width(), static_cast<int>(std::lround(x1)));
  const int iy0 = std::max(0, static_cast<int>(std::lround(y0)));
  const int iy1 = std::min(img.height(), static_cast<int>(std::lround(y1)));
  for (int y = iy0; y < iy1; ++y) {
    for (int x = ix0; x < ix1; ++x) img.at(x, y) = value;
  }
}

inline void paint_clutter(Raster<double>& img, int shapes, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(0.0, img.width());
  std::uniform_real_distribution<double> uy(0.0, img.height());
  std::uniform_real_distribution<double> size(3.0, 30.0);
  std::uniform_real_distribution<double> tone(30.0, 200.0);
  std::bernoulli_distribution round(0.5);
  for (int k = 0; k < shapes; ++k) {
    const double x = ux(rng);
    const double y = uy(rng);
    const double w = size(rng);
    const double h = size(rng);
    const double v = tone(rng);
    if (round(rng)) {
      paint_ellipse(img, x, y, w / 2, h / 2, v);
    } else {
      paint_rect(img, x, y, x + w, y + h, v);
    }
  }
}

inline GrayImage finish(const Raster<double>& img, double noise, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, noise);
  std::vector<std::uint8_t> out(img.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = clamp_byte(img.data()[i] + n(rng));
  return GrayImage(img.width(), img.height(), std::move(out));
}

inline Raster<double> background(int width, int height, const Config& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> base(50.0, 120.0);
  Raster<double> img(width, height, base(rng));
  const int shapes = static_cast<int>(std::lround(cfg.clutter_shapes * (static_cast<double>(width) * height) /
                                                  (static_cast<double>(cfg.negative_width) * cfg.negative_height)));
  paint_clutter(img, std::max(1, shapes), rng);
  return img;
}

}  // namespace detail

/// Paints a bright standing figure into `box` (pixel coordinates of `img`).
inline void paint_silhouette(Raster<double>& img, double left, double top, double width, double height,
                             std::mt19937_64& rng) {
  std::uniform_real_distribution<double> jitter(-0.03, 0.03);
  std::uniform_real_distribution<double> tone(190.0, 240.0);
  std::uniform_real_distribution<double> stance(0.0, 0.06);
  const double v = tone(rng);
  const double dx = jitter(rng);
  const double dy = jitter(rng);
  const double spread = stance(rng);
  const auto X = [&](double u) { return left + (u + dx) * width; };
  const auto Y = [&](double t) { return top + (t + dy) * height; };
  detail::paint_ellipse(img, X(0.5), Y(0.15), 0.12 * width, 0.075 * height, v);
  detail::paint_rect(img, X(0.30), Y(0.23), X(0.70), Y(0.58), v);
  detail::paint_rect(img, X(0.19), Y(0.25), X(0.28), Y(0.55), v);
  detail::paint_rect(img, X(0.72), Y(0.25), X(0.81), Y(0.55), v);
  detail::paint_rect(img, X(0.32 - spread), Y(0.58), X(0.46 - spread), Y(0.92), v);
  detail::paint_rect(img, X(0.54 + spread), Y(0.58), X(0.68 + spread), Y(0.92), v);
}

inline GrayImage positive_window(const Config& cfg, std::mt19937_64& rng) {
  Raster<double> img = detail::background(cfg.window_width, cfg.window_height, cfg, rng);
  paint_silhouette(img, 0.0, 0.0, cfg.window_width, cfg.window_height, rng);
  return detail::finish(img, cfg.pixel_noise, rng);
}

/// Paints a figure straddling one image border (or a corner) with 35-80% of
/// its extent visible along each clipped axis.
inline void paint_clipped_silhouette(Raster<double>& img, const Config& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> scale(0.9, 2.0);
  std::uniform_real_distribution<double> visible(0.35, 0.8);
  std::bernoulli_distribution pick(0.5);
  const double s = scale(rng);
  const double w = cfg.window_width * s;
  const double h = cfg.window_height * s;
  std::uniform_real_distribution<double> ux(0.0, std::max(0.0, img.width() - w));
  std::uniform_real_distribution<double> uy(0.0, std::max(0.0, img.height() - h));
  double left = ux(rng);
  double top = uy(rng);
  const bool clip_x = pick(rng);
  const bool clip_y = !clip_x || pick(rng);
  if (clip_x) {
    const double keep = visible(rng);
    left = pick(rng) ? -(1.0 - keep) * w : img.width() - keep * w;
  }
  if (clip_y) {
    const double keep = visible(rng);
    top = pick(rng) ? -(1.0 - keep) * h : img.height() - keep * h;
  }
  paint_silhouette(img, left, top, w, h, rng);
}

inline void paint_small_silhouette(Raster<double>& img, const Config& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> scale(0.4, 0.78);
  const double s = scale(rng);
  const double w = cfg.window_width * s;
  const double h = cfg.window_height * s;
  std::uniform_real_distribution<double> ux(0.0, std::max(0.0, img.width() - w));
  std::uniform_real_distribution<double> uy(0.0, std::max(0.0, img.height() - h));
  const double left = ux(rng);
  const double top = uy(rng);
  paint_silhouette(img, left, top, w, h, rng);
}

inline void paint_oversized_silhouette(Raster<double>& img, const Config& cfg, std::mt19937_64& rng) {
  const double min_scale = 1.05 * std::max(static_cast<double>(img.width()) / cfg.window_width,
                                           static_cast<double>(img.height()) / cfg.window_height);
  std::uniform_real_distribution<double> scale(min_scale, 1.4 * min_scale);
  const double s = scale(rng);
  const double w = cfg.window_width * s;
  const double h = cfg.window_height * s;
  std::uniform_real_distribution<double> ux(-w + 0.3 * img.width(), 0.7 * img.width());
  std::uniform_real_distribution<double> uy(-h + 0.3 * img.height(), 0.7 * img.height());
  const double left = ux(rng);
  const double top = uy(rng);
  paint_silhouette(img, left, top, w, h, rng);
}

inline GrayImage negative_image(const Config& cfg, std::mt19937_64& rng) {
  Raster<double> img = detail::background(cfg.negative_width, cfg.negative_height, cfg, rng);
  for (int k = 0; k < cfg.oversized_figures; ++k) paint_oversized_silhouette(img, cfg, rng);
  for (int k = 0; k < cfg.partial_figures; ++k) paint_clipped_silhouette(img, cfg, rng);
  for (int k = 0; k < cfg.small_figures; ++k) paint_small_silhouette(img, cfg, rng);
  return detail::finish(img, cfg.pixel_noise, rng);
}

inline GrayImage negative_window(const Config& cfg, std::mt19937_64& rng) {
  const Raster<double> img = detail::background(cfg.window_width, cfg.window_height, cfg, rng);
  return detail::finish(img, cfg.pixel_noise, rng);
}

struct Scene {
  GrayImage image;
  Rect target;
};

/// Clutter background with one figure whose box is the window scaled by `scale`.
inline Scene make_scene(const Config& cfg, int width, int height, double scale, std::mt19937_64& rng) {
  Raster<double> img = detail::background(width, height, cfg, rng);
  const int tw = static_cast<int>(std::lround(cfg.window_width * scale));
  const int th = static_cast<int>(std::lround(cfg.window_height * scale));
  std::uniform_int_distribution<int> ux(0, width - tw);
  std::uniform_int_distribution<int> uy(0, height - th);
  const int left = ux(rng);
  const int top = uy(rng);
  paint_silhouette(img, left, top, tw, th, rng);
  return {detail::finish(img, cfg.pixel_noise, rng), Rect{top, left, th, tw}};
}

struct Dataset {
  std::vector<GrayImage> positives;
  std::vector<GrayImage> negatives;
  std::vector<GrayImage> test_positives;
  std::vector<GrayImage> test_negatives;
};

struct DatasetSize {
  std::size_t positives = 200;
  std::size_t negatives = 40;
  std::size_t test_positives = 200;
  std::size_t test_negatives = 20;
};

inline Dataset make_dataset(const Config& cfg, const DatasetSize& size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Dataset d;
  for (std::size_t i = 0; i < size.positives; ++i) d.positives.push_back(positive_window(cfg, rng));
  for (std::size_t i = 0; i < size.negatives; ++i) d.negatives.push_back(negative_image(cfg, rng));
  for (std::size_t i = 0; i < size.test_positives; ++i) d.test_positives.push_back(positive_window(cfg, rng));
  for (std::size_t i = 0; i < size.test_negatives; ++i) d.test_negatives.push_back(negative_image(cfg, rng));
  return d;
}

/// Writes PGM files under dir/{train,test}/{pos,neg} and dir/manifest.json.
inline void write_dataset(const std::filesystem::path& dir, const Dataset& d, std::uint64_t seed) {
  const auto dump = [&](const std::filesystem::path& sub, const std::vector<GrayImage>& images) {
    const auto folder = dir / sub;
    std::filesystem::create_directories(folder);
    for (std::size_t i = 0; i < images.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "%06zu.pgm", i);
      write_pgm(folder / name, images[i]);
    }
  };
  dump("train/pos", d.positives);
  dump("train/neg", d.negatives);
  dump("test/pos", d.test_positives);
  dump("test/neg", d.test_negatives);
  const nlohmann::json manifest{{"root", "."},
                                {"positives", "train/pos"},
                                {"negatives", "train/neg"},
                                {"test_positives", "test/pos"},
                                {"test_negatives", "test/neg"},
                                {"seed", seed}};
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace tcensus::synthetic
