#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tcensus/error.hpp"
#include "tcensus/image.hpp"

namespace tcensus {

struct WindowSample {
  std::vector<GrayImage> windows;
  /// Indices of source images too small for one window.
  std::vector<std::size_t> skipped;
};

/// `count` windows at uniformly random origins, taken round-robin over the
/// images that can hold one. Deterministic for a fixed seed.
inline WindowSample sample_windows(std::span<const GrayImage> images, std::size_t count,
                                   int window_width, int window_height, std::uint64_t seed) {
  WindowSample out;
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].width() >= window_width && images[i].height() >= window_height) {
      usable.push_back(i);
    } else {
      out.skipped.push_back(i);
    }
  }
  if (count == 0) return out;
  if (usable.empty()) {
    throw Error(ErrorCode::ImageTooSmall, "no image is large enough to sample a window from");
  }
  std::mt19937_64 rng(seed);
  out.windows.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const GrayImage& img = images[usable[k % usable.size()]];
    std::uniform_int_distribution<int> ux(0, img.width() - window_width);
    std::uniform_int_distribution<int> uy(0, img.height() - window_height);
    const int x = ux(rng);
    const int y = uy(rng);
    out.windows.push_back(crop(img, x, y, window_width, window_height));
  }
  return out;
}

}  // namespace tcensus
