#pragma once

// Literal, per-pixel reference versions of the census transforms. Nothing here
// shares code with census.hpp; tests and `selftest` compare the two.

#include <cstdint>
#include <cstdlib>
#include <vector>

#include "tcensus/image.hpp"

namespace tcensus::oracle {

inline int pixel(const GrayImage& img, int x, int y) { return img.data()[static_cast<std::size_t>(y * img.width() + x)]; }

/// Binary census code: neighbors read left to right, top to bottom, first one most significant.
inline int census_code(const GrayImage& img, int x, int y) {
  const int c = pixel(img, x, y);
  int code = 0;
  int weight = 128;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      if (c < pixel(img, x + dx, y + dy)) code += weight;
      weight /= 2;
    }
  }
  return code;
}

/// Ternary digits for the clockwise ring starting at top-left.
inline std::vector<int> ternary_digits(const GrayImage& img, int x, int y) {
  const int ring_x[8] = {x - 1, x, x + 1, x + 1, x + 1, x, x - 1, x - 1};
  const int ring_y[8] = {y - 1, y - 1, y - 1, y, y + 1, y + 1, y + 1, y};
  const int c = pixel(img, x, y);
  std::vector<int> digits(8);
  for (int i = 0; i < 8; ++i) {
    const int a = pixel(img, ring_x[i], ring_y[i]);
    const int b = pixel(img, ring_x[(i + 1) % 8], ring_y[(i + 1) % 8]);
    const int lo = a < b ? a : b;
    const int hi = a < b ? b : a;
    if (c < lo) {
      digits[i] = -1;
    } else if (c > hi) {
      digits[i] = 1;
    } else {
      digits[i] = 0;
    }
  }
  return digits;
}

/// Sum over i of |bit_i - bit_{i+1 mod 8}|.
inline int transitions(const std::vector<int>& bits) {
  int g = 0;
  for (int i = 0; i < 8; ++i) g += std::abs(bits[i] - bits[(i + 1) % 8]);
  return g;
}

inline std::vector<int> bits_of(int code) {
  std::vector<int> bits(8);
  for (int i = 0; i < 8; ++i) bits[i] = (code >> i) & 1;
  return bits;
}

/// Compact label: rank of a uniform code among all uniform codes, or 58 for hybrids.
inline int compact_label_uncached(int code) {
  if (transitions(bits_of(code)) > 2) return 8 * 7 + 2;
  int rank = 0;
  for (int c = 0; c < code; ++c) {
    if (transitions(bits_of(c)) <= 2) ++rank;
  }
  return rank;
}

inline int compact_label(int code) {
  static const std::vector<int> table = [] {
    std::vector<int> t(256);
    for (int c = 0; c < 256; ++c) t[c] = compact_label_uncached(c);
    return t;
  }();
  return table[static_cast<std::size_t>(code)];
}

/// Label of sub-pattern t (1 = positive digits, 2 = negative digits) at an interior pixel.
inline int utct(const GrayImage& img, int x, int y, int t) {
  const std::vector<int> digits = ternary_digits(img, x, y);
  const int wanted = t == 1 ? 1 : -1;
  int code = 0;
  for (int i = 0; i < 8; ++i) {
    if (digits[i] == wanted) code += 1 << i;
  }
  return compact_label(code);
}

}  // namespace tcensus::oracle
