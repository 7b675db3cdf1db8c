#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tcensus/error.hpp"

namespace tcensus {

/// Row-major 2-D buffer. x is the column, y the row.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}
  Raster(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw Error(ErrorCode::InvalidConfig, "raster data length does not match dimensions");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }

  T& at(int x, int y) { return data_[index(x, y)]; }
  const T& at(int x, int y) const { return data_[index(x, y)]; }

  T* row(int y) { return data_.data() + index(0, y); }
  const T* row(int y) const { return data_.data() + index(0, y); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  bool operator==(const Raster&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Single-channel 8-bit intensity image. Immutable once built.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::vector<std::uint8_t> data)
      : pixels_(check_dims(width, height), height, std::move(data)) {}
  explicit GrayImage(Raster<std::uint8_t> pixels) : pixels_(std::move(pixels)) {}

  int width() const noexcept { return pixels_.width(); }
  int height() const noexcept { return pixels_.height(); }
  std::uint8_t at(int x, int y) const { return pixels_.at(x, y); }
  const std::uint8_t* row(int y) const { return pixels_.row(y); }
  std::span<const std::uint8_t> data() const noexcept { return pixels_.data(); }
  const Raster<std::uint8_t>& raster() const noexcept { return pixels_; }

  bool operator==(const GrayImage&) const = default;

 private:
  static int check_dims(int width, int height) {
    if (width < 0 || height < 0) {
      throw Error(ErrorCode::InvalidConfig, "negative image dimensions");
    }
    return width;
  }

  Raster<std::uint8_t> pixels_;
};

inline GrayImage crop(const GrayImage& img, int left, int top, int width, int height) {
  if (left < 0 || top < 0 || width < 0 || height < 0 || left + width > img.width() ||
      top + height > img.height()) {
    throw Error(ErrorCode::OutOfBounds, "crop rectangle leaves the image");
  }
  std::vector<std::uint8_t> out(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    std::copy_n(img.row(top + y) + left, width, out.data() + static_cast<std::size_t>(y) * width);
  }
  return GrayImage(width, height, std::move(out));
}

inline GrayImage mirror_horizontal(const GrayImage& img) {
  std::vector<std::uint8_t> out(img.data().begin(), img.data().end());
  for (int y = 0; y < img.height(); ++y) {
    std::reverse(out.begin() + static_cast<std::ptrdiff_t>(y) * img.width(),
                 out.begin() + static_cast<std::ptrdiff_t>(y + 1) * img.width());
  }
  return GrayImage(img.width(), img.height(), std::move(out));
}

/// Bilinear resampling where destination pixel centers map to source
/// coordinates (d + 0.5) * scale - 0.5, with `scale` = source / destination.
inline GrayImage resize_bilinear(const GrayImage& img, int width, int height, double scale_x,
                                 double scale_y) {
  if (img.width() == 0 || img.height() == 0 || width <= 0 || height <= 0) {
    throw Error(ErrorCode::ImageTooSmall, "cannot resample an empty image");
  }
  std::vector<std::uint8_t> out(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  const int max_x = img.width() - 1;
  const int max_y = img.height() - 1;
  for (int y = 0; y < height; ++y) {
    const double sy = std::clamp((y + 0.5) * scale_y - 0.5, 0.0, static_cast<double>(max_y));
    const int y0 = static_cast<int>(sy);
    const int y1 = std::min(y0 + 1, max_y);
    const double fy = sy - y0;
    for (int x = 0; x < width; ++x) {
      const double sx = std::clamp((x + 0.5) * scale_x - 0.5, 0.0, static_cast<double>(max_x));
      const int x0 = static_cast<int>(sx);
      const int x1 = std::min(x0 + 1, max_x);
      const double fx = sx - x0;
      const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
      const double bottom = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
      const double v = top * (1.0 - fy) + bottom * fy;
      out[static_cast<std::size_t>(y) * width + x] =
          static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return GrayImage(width, height, std::move(out));
}

inline GrayImage resize_bilinear(const GrayImage& img, int width, int height) {
  return resize_bilinear(img, width, height, static_cast<double>(img.width()) / width,
                         static_cast<double>(img.height()) / height);
}

/// Scales so the image covers width x height, then center-crops to exactly that size.
inline GrayImage fit_to_window(const GrayImage& img, int width, int height) {
  if (img.width() == width && img.height() == height) return img;
  const double scale = std::max(static_cast<double>(width) / img.width(),
                                static_cast<double>(height) / img.height());
  const int rw = std::max(width, static_cast<int>(std::ceil(img.width() * scale - 1e-9)));
  const int rh = std::max(height, static_cast<int>(std::ceil(img.height() * scale - 1e-9)));
  const GrayImage resized = resize_bilinear(img, rw, rh);
  return crop(resized, (rw - width) / 2, (rh - height) / 2, width, height);
}

}  // namespace tcensus
