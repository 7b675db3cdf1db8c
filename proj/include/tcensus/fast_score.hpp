#pragma once

// Integral-image window scoring. A linear model's score over a window is a sum
// of per-pixel weights: each valid pixel inside a block rect contributes the
// weight of (block, channel, label at that pixel). Putting those weights into
// auxiliary images turns every window score into a handful of rectangle sums.

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "tcensus/error.hpp"
#include "tcensus/features.hpp"
#include "tcensus/integral.hpp"
#include "tcensus/layout.hpp"
#include "tcensus/svm.hpp"

namespace tcensus {

/// Blocks whose rects are pairwise disjoint share one set of auxiliary images.
/// A non-overlapping grid is a single layer; overlapping layouts need several.
struct AuxiliaryLayer {
  std::vector<std::size_t> blocks;
  /// One raster per label channel (a1, a2 for T-CENTRIST).
  std::vector<Raster<double>> channels;
};

struct AuxiliaryImages {
  std::vector<AuxiliaryLayer> layers;
};

struct IntegralLayer {
  std::vector<std::size_t> blocks;
  std::vector<IntegralImage> channels;
};

using AuxiliaryIntegrals = std::vector<IntegralLayer>;

struct AuxiliaryOptions {
  /// Allow layouts whose blocks overlap (scored through several layers).
  /// When false the layout must be a non-overlapping grid.
  bool allow_overlap = true;
};

namespace detail {

/// Per-pixel weight multiplier of a block: 1, or 1/pixel-count for normalized models.
inline double block_weight_scale(const LinearModel& model, const ExtensionBlockStructure& block) {
  if (!model.normalized) return 1.0;
  const int area = block.interior_area();
  return area > 0 ? 1.0 / area : 0.0;
}

inline void require_compatible(const LinearModel& model, const LabelImages& labels) {
  if (model.layout.descriptor != labels.descriptor) {
    throw Error(ErrorCode::InvalidConfig, "model and label images use different descriptors");
  }
  if (model.weights.size() != model.layout.dimension()) {
    throw Error(ErrorCode::InvalidConfig, "model weights do not match its layout");
  }
}

inline bool blocks_intersect(const ExtensionBlockStructure& a, const ExtensionBlockStructure& b) {
  for (const Rect& r : a.rects) {
    for (const Rect& q : b.rects) {
      if (r.intersects(q)) return true;
    }
  }
  return false;
}

}  // namespace detail

/// Greedy first-fit partition of the blocks into pairwise-disjoint groups.
inline std::vector<std::vector<std::size_t>> disjoint_layers(const BlockLayout& layout) {
  std::vector<std::vector<std::size_t>> layers;
  for (std::size_t b = 0; b < layout.blocks.size(); ++b) {
    auto fits = [&](const std::vector<std::size_t>& layer) {
      return std::none_of(layer.begin(), layer.end(), [&](std::size_t o) {
        return detail::blocks_intersect(layout.blocks[b], layout.blocks[o]);
      });
    };
    auto it = std::find_if(layers.begin(), layers.end(), fits);
    if (it == layers.end()) {
      layers.emplace_back();
      it = std::prev(layers.end());
    }
    it->push_back(b);
  }
  return layers;
}

/// Window-bound auxiliary images for the window at (origin_x, origin_y): in the
/// layer holding block b, a_c(x, y) = weight(b, c, label_c(x, y)) over b's
/// interior and 0 elsewhere.
inline AuxiliaryImages build_auxiliary_images(const LinearModel& model, const LabelImages& labels,
                                              int origin_x, int origin_y,
                                              AuxiliaryOptions opts = {}) {
  detail::require_compatible(model, labels);
  const BlockLayout& layout = model.layout;
  if (!opts.allow_overlap && !layout.non_overlapping()) {
    throw Error(ErrorCode::LayoutNotGridded, "overlapping blocks need layered auxiliary images");
  }
  if (origin_x < 0 || origin_y < 0 || origin_x + layout.window_width > labels.width() ||
      origin_y + layout.window_height > labels.height()) {
    throw Error(ErrorCode::OutOfBounds, "window leaves the label image");
  }
  const std::size_t bins = static_cast<std::size_t>(labels.bins());
  const std::size_t per_block = static_cast<std::size_t>(block_dimension(layout.descriptor));
  AuxiliaryImages aux;
  for (auto& members : disjoint_layers(layout)) {
    AuxiliaryLayer layer{std::move(members), {}};
    for (std::size_t c = 0; c < labels.channels.size(); ++c) {
      layer.channels.emplace_back(labels.width(), labels.height(), 0.0);
    }
    for (const std::size_t b : layer.blocks) {
      const ExtensionBlockStructure& block = layout.blocks[b];
      const double scale = detail::block_weight_scale(model, block);
      for (std::size_t c = 0; c < labels.channels.size(); ++c) {
        const double* w = model.weights.data() + b * per_block + c * bins;
        const Raster<std::uint8_t>& ch = labels.channels[c];
        Raster<double>& out = layer.channels[c];
        for (const Rect& r : block.rects) {
          for (int y = origin_y + r.top + 1; y < origin_y + r.bottom() - 1; ++y) {
            for (int x = origin_x + r.left + 1; x < origin_x + r.right() - 1; ++x) {
              if (labels.valid(x, y)) out.at(x, y) = scale * w[ch.at(x, y)];
            }
          }
        }
      }
    }
    aux.layers.push_back(std::move(layer));
  }
  return aux;
}

inline AuxiliaryIntegrals integrate(const AuxiliaryImages& aux) {
  AuxiliaryIntegrals out;
  out.reserve(aux.layers.size());
  for (const auto& layer : aux.layers) {
    IntegralLayer il{layer.blocks, {}};
    for (const auto& ch : layer.channels) il.channels.emplace_back(ch);
    out.push_back(std::move(il));
  }
  return out;
}

/// bias + sum over channels, blocks and rects of the rect's inset-interior sum,
/// read from the layer holding the block. Exactly 4 table reads per (channel, rect).
inline double fast_window_score(const AuxiliaryIntegrals& integrals, const BlockLayout& layout,
                                int origin_x, int origin_y, double bias,
                                LookupCounter* counter = nullptr) {
  double score = bias;
  for (const IntegralLayer& layer : integrals) {
    for (const IntegralImage& ii : layer.channels) {
      for (const std::size_t b : layer.blocks) {
        for (const Rect& r : layout.blocks[b].rects) {
          score += ii.rect_sum(origin_x + r.left + 1, origin_y + r.top + 1, r.width - 2,
                               r.height - 2, counter);
        }
      }
    }
  }
  return score;
}

/// Reference path: extract the window's features and take the dot product.
inline double naive_window_score(const LinearModel& model, const LabelImages& labels, int origin_x,
                                 int origin_y) {
  detail::require_compatible(model, labels);
  return model.score(
      extract_features(labels, model.layout, origin_x, origin_y, {.normalize = model.normalized}));
}

/// Scores every window of one image from shift-summed auxiliary images.
///
/// Rects sharing an interior shape (h, w) are merged: for that shape,
///   A(u, v) = sum over its rects r of weight(block(r), c, label_c(u + dy_r, v + dx_r))
/// where (dy_r, dx_r) is r's interior offset in the window. A window at (ox, oy)
/// then scores as the sum over shapes of one h x w rectangle of A at (ox, oy).
/// Building costs O(rects x pixels) once per image; each window costs
/// 4 x shapes x channels reads.
class ScanScorer {
 public:
  ScanScorer(const LinearModel& model, const LabelImages& labels)
      : window_width_(model.layout.window_width), window_height_(model.layout.window_height),
        width_(labels.width()), height_(labels.height()), bias_(model.bias) {
    detail::require_compatible(model, labels);
    if (window_width_ > width_ || window_height_ > height_) {
      throw Error(ErrorCode::WindowTooLarge, "detection window does not fit the image");
    }
    const BlockLayout& layout = model.layout;
    const std::size_t bins = static_cast<std::size_t>(labels.bins());
    const std::size_t per_block = static_cast<std::size_t>(block_dimension(layout.descriptor));

    std::map<std::pair<int, int>, std::vector<std::pair<std::size_t, Rect>>> by_shape;
    for (std::size_t b = 0; b < layout.blocks.size(); ++b) {
      for (const Rect& r : layout.blocks[b].rects) {
        by_shape[{r.height - 2, r.width - 2}].push_back({b, r});
      }
    }

    const int origins_x = width_ - window_width_ + 1;
    const int origins_y = height_ - window_height_ + 1;
    for (const auto& [shape, members] : by_shape) {
      const auto [ih, iw] = shape;
      Shape s{ih, iw, {}};
      // A is only read over [0, origins + interior extent); the rest stays 0.
      const int span_x = origins_x + iw - 1;
      const int span_y = origins_y + ih - 1;
      for (std::size_t c = 0; c < labels.channels.size(); ++c) {
        Raster<double> acc(width_, height_, 0.0);
        const Raster<std::uint8_t>& ch = labels.channels[c];
        for (const auto& [b, r] : members) {
          const double scale = detail::block_weight_scale(model, layout.blocks[b]);
          const double* w = model.weights.data() + b * per_block + c * bins;
          const int dx = r.left + 1;
          const int dy = r.top + 1;
          for (int v = 0; v < span_y; ++v) {
            const std::uint8_t* src = ch.row(v + dy) + dx;
            double* dst = acc.row(v);
            for (int u = 0; u < span_x; ++u) dst[u] += scale * w[src[u]];
          }
        }
        s.integrals.emplace_back(acc);
      }
      shapes_.push_back(std::move(s));
    }
  }

  int origins_x() const noexcept { return width_ - window_width_ + 1; }
  int origins_y() const noexcept { return height_ - window_height_ + 1; }
  std::size_t shape_count() const noexcept { return shapes_.size(); }

  double score(int origin_x, int origin_y, LookupCounter* counter = nullptr) const {
    if (origin_x < 0 || origin_y < 0 || origin_x >= origins_x() || origin_y >= origins_y()) {
      throw Error(ErrorCode::OutOfBounds, "window origin leaves the image");
    }
    double total = bias_;
    for (const Shape& s : shapes_) {
      for (const IntegralImage& ii : s.integrals) {
        total += ii.rect_sum(origin_x, origin_y, s.width, s.height, counter);
      }
    }
    return total;
  }

 private:
  struct Shape {
    int height;
    int width;
    std::vector<IntegralImage> integrals;
  };

  int window_width_;
  int window_height_;
  int width_;
  int height_;
  double bias_;
  std::vector<Shape> shapes_;
};

}  // namespace tcensus
