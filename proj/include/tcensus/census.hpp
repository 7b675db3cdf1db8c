#pragma once

// Pixel-level census codes over the 3x3 neighborhood: the binary census
// transform used by CENTRIST and the ternary pair-wise transform whose
// positive/negative sub-patterns are reduced to uniform-pattern labels.

#include <array>
#include <bit>
#include <cstdint>
#include <span>

#include "tcensus/error.hpp"
#include "tcensus/image.hpp"

namespace tcensus {

inline constexpr int kRingSize = 8;
/// Compact labels per sub-pattern: 58 uniform codes plus one shared hybrid label.
inline constexpr int kUniformLabels = kRingSize * (kRingSize - 1) + 2;
inline constexpr std::uint8_t kHybridLabel = kUniformLabels;
inline constexpr int kUtctBins = kUniformLabels + 1;
inline constexpr int kCtBins = 256;
/// Fill value of the undefined 1-pixel border in label rasters.
inline constexpr std::uint8_t kInvalidLabel = 0xFF;

struct Offset {
  int dx;
  int dy;
};

/// Ring p0..p7, clockwise from the top-left neighbor.
inline constexpr std::array<Offset, kRingSize> kNeighborRing{{
    {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0},
}};

/// Scan order (left to right, top to bottom) used for the binary census code.
/// The first entry lands on the most significant bit.
inline constexpr std::array<Offset, kRingSize> kCensusScanOrder{{
    {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1},
}};

/// Nine intensities of a 3x3 neighborhood in row-major order; index 4 is the center.
using Window3x3 = std::array<std::uint8_t, 9>;

constexpr std::uint8_t window_at(const Window3x3& w, Offset o) noexcept {
  return w[static_cast<std::size_t>((o.dy + 1) * 3 + (o.dx + 1))];
}

constexpr std::uint8_t ct_code(const Window3x3& w) noexcept {
  const std::uint8_t center = w[4];
  unsigned code = 0;
  for (const Offset o : kCensusScanOrder) {
    code = (code << 1) | (center < window_at(w, o) ? 1u : 0u);
  }
  return static_cast<std::uint8_t>(code);
}

/// Eight digits in {-1, 0, +1}; digit i compares the center with ring pair (p_i, p_{i+1}).
using TernaryCode = std::array<std::int8_t, kRingSize>;

constexpr TernaryCode tct_code(const Window3x3& w) noexcept {
  const std::uint8_t center = w[4];
  TernaryCode code{};
  for (int i = 0; i < kRingSize; ++i) {
    const std::uint8_t a = window_at(w, kNeighborRing[static_cast<std::size_t>(i)]);
    const std::uint8_t b = window_at(w, kNeighborRing[static_cast<std::size_t>((i + 1) % kRingSize)]);
    const std::uint8_t lo = a < b ? a : b;
    const std::uint8_t hi = a < b ? b : a;
    code[static_cast<std::size_t>(i)] = center < lo ? -1 : (center > hi ? 1 : 0);
  }
  return code;
}

/// Bit i of each code is ternary digit i.
struct SubPatternCode {
  std::uint8_t positive = 0;
  std::uint8_t negative = 0;

  bool operator==(const SubPatternCode&) const = default;
};

constexpr SubPatternCode decompose(const TernaryCode& code) noexcept {
  SubPatternCode out;
  for (int i = 0; i < kRingSize; ++i) {
    const auto bit = static_cast<std::uint8_t>(1u << i);
    if (code[static_cast<std::size_t>(i)] > 0) out.positive |= bit;
    if (code[static_cast<std::size_t>(i)] < 0) out.negative |= bit;
  }
  return out;
}

/// Number of 0/1 changes around the circular 8-bit sequence.
constexpr int uniformity(std::uint8_t bits) noexcept {
  const auto rotated = std::rotr(bits, 1);
  return std::popcount(static_cast<std::uint8_t>(bits ^ rotated));
}

/// Maps every 8-bit code to its compact label: uniform codes get 0..57 in
/// ascending code order, everything else the hybrid label 58.
class UniformLut {
 public:
  constexpr UniformLut() noexcept {
    int next = 0;
    for (int code = 0; code < 256; ++code) {
      table_[static_cast<std::size_t>(code)] =
          uniformity(static_cast<std::uint8_t>(code)) <= 2 ? static_cast<std::uint8_t>(next++)
                                                          : kHybridLabel;
    }
  }

  constexpr std::uint8_t operator[](std::uint8_t code) const noexcept { return table_[code]; }

  constexpr int uniform_count() const noexcept {
    int n = 0;
    for (const auto label : table_) n += label != kHybridLabel ? 1 : 0;
    return n;
  }

 private:
  std::array<std::uint8_t, 256> table_{};
};

inline constexpr UniformLut kUniformLut{};

constexpr std::uint8_t utct_label(std::uint8_t bits, const UniformLut& lut = kUniformLut) noexcept {
  return lut[bits];
}

/// The two UTCT label images. The 1-pixel border is undefined and holds kInvalidLabel.
struct CodeImagePair {
  Raster<std::uint8_t> i1;
  Raster<std::uint8_t> i2;

  int width() const noexcept { return i1.width(); }
  int height() const noexcept { return i1.height(); }
  bool valid(int x, int y) const noexcept {
    return x >= 1 && y >= 1 && x < width() - 1 && y < height() - 1;
  }
};

/// Binary census codes. Border pixels are undefined (left at 0); test with valid().
struct CtImage {
  Raster<std::uint8_t> codes;

  int width() const noexcept { return codes.width(); }
  int height() const noexcept { return codes.height(); }
  bool valid(int x, int y) const noexcept {
    return x >= 1 && y >= 1 && x < width() - 1 && y < height() - 1;
  }
};

namespace detail {

inline void require_census_size(const GrayImage& img) {
  if (img.width() < 3 || img.height() < 3) {
    throw Error(ErrorCode::ImageTooSmall, "census transforms need at least a 3x3 image, got " +
                                              std::to_string(img.width()) + "x" +
                                              std::to_string(img.height()));
  }
}

inline Window3x3 gather(const GrayImage& img, int x, int y) noexcept {
  const std::uint8_t* up = img.row(y - 1) + x;
  const std::uint8_t* mid = img.row(y) + x;
  const std::uint8_t* down = img.row(y + 1) + x;
  return {up[-1], up[0], up[1], mid[-1], mid[0], mid[1], down[-1], down[0], down[1]};
}

}  // namespace detail

inline CtImage ct_image(const GrayImage& img) {
  detail::require_census_size(img);
  CtImage out{Raster<std::uint8_t>(img.width(), img.height(), 0)};
  for (int y = 1; y < img.height() - 1; ++y) {
    std::uint8_t* dst = out.codes.row(y);
    for (int x = 1; x < img.width() - 1; ++x) {
      dst[x] = ct_code(detail::gather(img, x, y));
    }
  }
  return out;
}

inline CodeImagePair utct_images(const GrayImage& img, const UniformLut& lut = kUniformLut) {
  detail::require_census_size(img);
  CodeImagePair out{Raster<std::uint8_t>(img.width(), img.height(), kInvalidLabel),
                    Raster<std::uint8_t>(img.width(), img.height(), kInvalidLabel)};
  for (int y = 1; y < img.height() - 1; ++y) {
    std::uint8_t* d1 = out.i1.row(y);
    std::uint8_t* d2 = out.i2.row(y);
    for (int x = 1; x < img.width() - 1; ++x) {
      const SubPatternCode sub = decompose(tct_code(detail::gather(img, x, y)));
      d1[x] = lut[sub.positive];
      d2[x] = lut[sub.negative];
    }
  }
  return out;
}

}  // namespace tcensus
