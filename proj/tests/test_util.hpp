#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tcensus/image.hpp"

namespace tcensus::testing {

inline GrayImage random_image(int width, int height, std::mt19937_64& rng, int lo = 0, int hi = 255) {
  std::uniform_int_distribution<int> u(lo, hi);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(width) * height);
  for (auto& p : px) p = static_cast<std::uint8_t>(u(rng));
  return GrayImage(width, height, std::move(px));
}

inline GrayImage constant_image(int width, int height, std::uint8_t v) {
  return GrayImage(width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, v));
}

inline GrayImage image_1_to_9() { return GrayImage(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9}); }

}  // namespace tcensus::testing
