#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tcensus/census.hpp"
#include "tcensus/error.hpp"
#include "tcensus/image.hpp"
#include "tcensus/layout.hpp"

namespace tcensus {

using FeatureVector = std::vector<double>;

/// Label channels of one descriptor over a whole image: I1, I2 for T-CENTRIST,
/// the census codes for CENTRIST. Valid pixels exclude the 1-pixel border.
struct LabelImages {
  Descriptor descriptor = Descriptor::TCentrist;
  std::vector<Raster<std::uint8_t>> channels;

  int width() const noexcept { return channels.empty() ? 0 : channels.front().width(); }
  int height() const noexcept { return channels.empty() ? 0 : channels.front().height(); }
  int bins() const noexcept { return bins_per_channel(descriptor); }
  bool valid(int x, int y) const noexcept {
    return x >= 1 && y >= 1 && x < width() - 1 && y < height() - 1;
  }

  static LabelImages from(CodeImagePair codes) {
    LabelImages out{Descriptor::TCentrist, {}};
    out.channels.push_back(std::move(codes.i1));
    out.channels.push_back(std::move(codes.i2));
    return out;
  }
  static LabelImages from(CtImage ct) {
    LabelImages out{Descriptor::Centrist, {}};
    out.channels.push_back(std::move(ct.codes));
    return out;
  }
};

inline LabelImages compute_labels(const GrayImage& img, Descriptor d) {
  return d == Descriptor::TCentrist ? LabelImages::from(utct_images(img))
                                    : LabelImages::from(ct_image(img));
}

struct ExtractOptions {
  /// Divide each histogram by its pixel count (L1 per block and channel).
  bool normalize = false;
};

namespace detail {

inline void require_inside(const LabelImages& labels, const Rect& r, int ox, int oy) {
  if (ox + r.left < 0 || oy + r.top < 0 || ox + r.right() > labels.width() ||
      oy + r.bottom() > labels.height()) {
    throw Error(ErrorCode::OutOfBounds, "block rect leaves the label image");
  }
}

}  // namespace detail

/// Adds the block's histograms into `out` (channels x bins, channel-major).
/// Counts only the inset interior of each rect, and only valid pixels.
inline void accumulate_block_histogram(const LabelImages& labels,
                                       const ExtensionBlockStructure& block, int origin_x,
                                       int origin_y, std::span<double> out) {
  const int bins = labels.bins();
  if (out.size() != labels.channels.size() * static_cast<std::size_t>(bins)) {
    throw Error(ErrorCode::InvalidConfig, "histogram buffer has the wrong size");
  }
  for (const Rect& r : block.rects) detail::require_inside(labels, r, origin_x, origin_y);
  for (std::size_t c = 0; c < labels.channels.size(); ++c) {
    double* hist = out.data() + c * static_cast<std::size_t>(bins);
    const Raster<std::uint8_t>& ch = labels.channels[c];
    for (const Rect& r : block.rects) {
      for (int y = origin_y + r.top + 1; y < origin_y + r.bottom() - 1; ++y) {
        const std::uint8_t* row = ch.row(y);
        for (int x = origin_x + r.left + 1; x < origin_x + r.right() - 1; ++x) {
          if (labels.valid(x, y)) hist[row[x]] += 1.0;
        }
      }
    }
  }
}

inline std::vector<double> block_histogram(const LabelImages& labels,
                                           const ExtensionBlockStructure& block, int origin_x,
                                           int origin_y) {
  std::vector<double> hist(labels.channels.size() * static_cast<std::size_t>(labels.bins()), 0.0);
  accumulate_block_histogram(labels, block, origin_x, origin_y, hist);
  return hist;
}

/// Concatenated block histograms in layout order.
inline FeatureVector extract_features(const LabelImages& labels, const BlockLayout& layout,
                                      int origin_x, int origin_y, ExtractOptions opts = {}) {
  if (labels.descriptor != layout.descriptor) {
    throw Error(ErrorCode::InvalidConfig, "label images and layout use different descriptors");
  }
  if (origin_x < 0 || origin_y < 0 || origin_x + layout.window_width > labels.width() ||
      origin_y + layout.window_height > labels.height()) {
    throw Error(ErrorCode::OutOfBounds, "window leaves the label image");
  }
  const std::size_t per_block = static_cast<std::size_t>(block_dimension(layout.descriptor));
  const std::size_t bins = static_cast<std::size_t>(labels.bins());
  FeatureVector out(layout.dimension(), 0.0);
  for (std::size_t b = 0; b < layout.blocks.size(); ++b) {
    std::span<double> seg(out.data() + b * per_block, per_block);
    accumulate_block_histogram(labels, layout.blocks[b], origin_x, origin_y, seg);
    if (opts.normalize) {
      for (std::size_t c = 0; c < labels.channels.size(); ++c) {
        double sum = 0.0;
        for (std::size_t k = 0; k < bins; ++k) sum += seg[c * bins + k];
        if (sum > 0.0) {
          for (std::size_t k = 0; k < bins; ++k) seg[c * bins + k] /= sum;
        }
      }
    }
  }
  return out;
}

inline FeatureVector extract_tcentrist(const CodeImagePair& codes, const BlockLayout& layout,
                                       int origin_x, int origin_y, ExtractOptions opts = {}) {
  if (layout.descriptor != Descriptor::TCentrist) {
    throw Error(ErrorCode::InvalidConfig, "layout is not a T-CENTRIST layout");
  }
  return extract_features(LabelImages::from(codes), layout, origin_x, origin_y, opts);
}

inline FeatureVector extract_centrist(const CtImage& ct, const BlockLayout& layout, int origin_x,
                                      int origin_y, ExtractOptions opts = {}) {
  if (layout.descriptor != Descriptor::Centrist) {
    throw Error(ErrorCode::InvalidConfig, "layout is not a CENTRIST layout");
  }
  return extract_features(LabelImages::from(ct), layout, origin_x, origin_y, opts);
}

/// Features of a window-sized image.
inline FeatureVector extract_window(const GrayImage& window, const BlockLayout& layout,
                                    ExtractOptions opts = {}) {
  return extract_features(compute_labels(window, layout.descriptor), layout, 0, 0, opts);
}

}  // namespace tcensus
