#pragma once

#include <cstddef>
#include <vector>

#include "tcensus/error.hpp"
#include "tcensus/image.hpp"

namespace tcensus {

/// Counts table reads when passed to IntegralImage::rect_sum.
struct LookupCounter {
  std::size_t lookups = 0;
};

/// Summed-area table one row and column larger than the source, zero on top/left.
class IntegralImage {
 public:
  IntegralImage() = default;

  template <typename T>
  explicit IntegralImage(const Raster<T>& src)
      : width_(src.width()), height_(src.height()),
        table_(static_cast<std::size_t>(width_ + 1) * static_cast<std::size_t>(height_ + 1), 0.0) {
    const std::size_t stride = static_cast<std::size_t>(width_) + 1;
    for (int y = 0; y < height_; ++y) {
      double run = 0.0;
      const T* row = src.row(y);
      double* above = table_.data() + static_cast<std::size_t>(y) * stride;
      double* cur = above + stride;
      for (int x = 0; x < width_; ++x) {
        run += static_cast<double>(row[x]);
        cur[x + 1] = above[x + 1] + run;
      }
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  /// Sum of the source over [left, left+width) x [top, top+height), four reads.
  double rect_sum(int left, int top, int width, int height, LookupCounter* counter = nullptr) const {
    if (left < 0 || top < 0 || width < 0 || height < 0 || left + width > width_ ||
        top + height > height_) {
      throw Error(ErrorCode::OutOfBounds, "integral rectangle leaves the table");
    }
    if (counter) counter->lookups += 4;
    return at(left + width, top + height) - at(left, top + height) - at(left + width, top) +
           at(left, top);
  }

 private:
  double at(int x, int y) const noexcept {
    return table_[static_cast<std::size_t>(y) * (static_cast<std::size_t>(width_) + 1) +
                  static_cast<std::size_t>(x)];
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> table_;
};

}  // namespace tcensus
