#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tcensus/census.hpp"
#include "tcensus/error.hpp"

namespace tcensus {

enum class Descriptor { TCentrist, Centrist };

constexpr int channel_count(Descriptor d) noexcept { return d == Descriptor::TCentrist ? 2 : 1; }
constexpr int bins_per_channel(Descriptor d) noexcept {
  return d == Descriptor::TCentrist ? kUtctBins : kCtBins;
}
constexpr int block_dimension(Descriptor d) noexcept { return channel_count(d) * bins_per_channel(d); }

constexpr std::string_view to_string(Descriptor d) noexcept {
  return d == Descriptor::TCentrist ? "tcentrist" : "centrist";
}

inline Descriptor parse_descriptor(std::string_view s) {
  if (s == "tcentrist") return Descriptor::TCentrist;
  if (s == "centrist") return Descriptor::Centrist;
  throw Error(ErrorCode::InvalidConfig, "unknown descriptor '" + std::string(s) + "'");
}

/// Window-relative rectangle. Only its 1-pixel-inset interior contributes to histograms.
struct Rect {
  int top = 0;
  int left = 0;
  int height = 0;
  int width = 0;

  int bottom() const noexcept { return top + height; }
  int right() const noexcept { return left + width; }
  int interior_area() const noexcept { return std::max(0, height - 2) * std::max(0, width - 2); }

  bool intersects(const Rect& o) const noexcept {
    return top < o.bottom() && o.top < bottom() && left < o.right() && o.left < right();
  }
  bool inside(int window_width, int window_height) const noexcept {
    return top >= 0 && left >= 0 && bottom() <= window_height && right() <= window_width;
  }

  bool operator==(const Rect&) const = default;
};

enum class BlockVariant { Base, ExtendUp, ExtendDown, ExtendLeft, ExtendRight };

/// Selection tie-break order.
inline constexpr std::array<BlockVariant, 5> kAllVariants{
    BlockVariant::Base, BlockVariant::ExtendUp, BlockVariant::ExtendDown,
    BlockVariant::ExtendLeft, BlockVariant::ExtendRight};

constexpr std::string_view to_string(BlockVariant v) noexcept {
  switch (v) {
    case BlockVariant::Base: return "base";
    case BlockVariant::ExtendUp: return "extend_up";
    case BlockVariant::ExtendDown: return "extend_down";
    case BlockVariant::ExtendLeft: return "extend_left";
    case BlockVariant::ExtendRight: return "extend_right";
  }
  return "base";
}

inline BlockVariant parse_variant(std::string_view s) {
  for (const BlockVariant v : kAllVariants) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown block variant '" + std::string(s) + "'");
}

inline constexpr std::size_t kMaxRectsPerBlock = 4;

/// A block as a union of 1..4 disjoint rectangles.
struct ExtensionBlockStructure {
  BlockVariant variant = BlockVariant::Base;
  std::vector<Rect> rects;

  int interior_area() const noexcept {
    int n = 0;
    for (const Rect& r : rects) n += r.interior_area();
    return n;
  }

  bool operator==(const ExtensionBlockStructure&) const = default;
};

/// Base rect plus, for the extended variants, a half-size rect glued to one side.
inline ExtensionBlockStructure make_structure(const Rect& base, BlockVariant variant) {
  ExtensionBlockStructure s{variant, {base}};
  const int half_h = base.height / 2;
  const int half_w = base.width / 2;
  switch (variant) {
    case BlockVariant::Base: break;
    case BlockVariant::ExtendUp: s.rects.push_back({base.top - half_h, base.left, half_h, base.width}); break;
    case BlockVariant::ExtendDown: s.rects.push_back({base.bottom(), base.left, half_h, base.width}); break;
    case BlockVariant::ExtendLeft: s.rects.push_back({base.top, base.left - half_w, base.height, half_w}); break;
    case BlockVariant::ExtendRight: s.rects.push_back({base.top, base.right(), base.height, half_w}); break;
  }
  return s;
}

inline bool structure_fits(const ExtensionBlockStructure& s, int window_width, int window_height) {
  return std::all_of(s.rects.begin(), s.rects.end(), [&](const Rect& r) {
    return r.height >= 3 && r.width >= 3 && r.inside(window_width, window_height);
  });
}

/// Ordered blocks tiling a detection window; block order fixes feature coordinates.
struct BlockLayout {
  int window_width = 0;
  int window_height = 0;
  Descriptor descriptor = Descriptor::TCentrist;
  std::vector<ExtensionBlockStructure> blocks;

  std::size_t block_count() const noexcept { return blocks.size(); }
  std::size_t dimension() const noexcept {
    return blocks.size() * static_cast<std::size_t>(block_dimension(descriptor));
  }
  std::size_t rect_count() const noexcept {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.rects.size();
    return n;
  }

  void validate() const {
    if (window_width < 3 || window_height < 3) {
      throw Error(ErrorCode::InvalidConfig, "window must be at least 3x3");
    }
    if (blocks.empty()) throw Error(ErrorCode::InvalidConfig, "layout has no blocks");
    for (const auto& b : blocks) {
      if (b.rects.empty() || b.rects.size() > kMaxRectsPerBlock) {
        throw Error(ErrorCode::InvalidConfig, "a block needs 1 to 4 rects");
      }
      if (!structure_fits(b, window_width, window_height)) {
        throw Error(ErrorCode::OutOfBounds, "block rect leaves the window or is smaller than 3x3");
      }
      for (std::size_t i = 0; i < b.rects.size(); ++i) {
        for (std::size_t j = i + 1; j < b.rects.size(); ++j) {
          if (b.rects[i].intersects(b.rects[j])) {
            throw Error(ErrorCode::InvalidConfig, "rects of one block overlap");
          }
        }
      }
    }
  }

  /// True when no two blocks share a pixel.
  bool non_overlapping() const noexcept {
    for (std::size_t a = 0; a < blocks.size(); ++a) {
      for (std::size_t b = a + 1; b < blocks.size(); ++b) {
        for (const Rect& ra : blocks[a].rects) {
          for (const Rect& rb : blocks[b].rects) {
            if (ra.intersects(rb)) return false;
          }
        }
      }
    }
    return true;
  }

  bool operator==(const BlockLayout&) const = default;
};

struct GridSpec {
  int window_width = 36;
  int window_height = 72;
  int block_width = 12;
  int block_height = 12;
  int stride_x = 6;
  int stride_y = 6;
};

inline std::vector<Rect> grid_rects(const GridSpec& g) {
  if (g.block_width < 3 || g.block_height < 3 || g.stride_x < 1 || g.stride_y < 1 ||
      g.block_width > g.window_width || g.block_height > g.window_height) {
    throw Error(ErrorCode::InvalidConfig, "invalid block grid");
  }
  std::vector<Rect> out;
  for (int top = 0; top + g.block_height <= g.window_height; top += g.stride_y) {
    for (int left = 0; left + g.block_width <= g.window_width; left += g.stride_x) {
      out.push_back({top, left, g.block_height, g.block_width});
    }
  }
  return out;
}

/// Base blocks on a regular grid, row-major. 36x72 with 12x12 blocks at stride 6 gives 55.
inline BlockLayout make_grid_layout(const GridSpec& g, Descriptor d = Descriptor::TCentrist) {
  BlockLayout layout{g.window_width, g.window_height, d, {}};
  for (const Rect& r : grid_rects(g)) layout.blocks.push_back(make_structure(r, BlockVariant::Base));
  return layout;
}

}  // namespace tcensus
