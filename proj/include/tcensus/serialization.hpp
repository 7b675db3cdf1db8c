#pragma once

// Versioned JSON documents for layouts, models and detections. Objects keep
// their keys sorted, so a given value always serializes to the same bytes.
// Model weights are stored as little-endian IEEE-754 hex, which round-trips
// bit for bit.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tcensus/detector.hpp"
#include "tcensus/error.hpp"
#include "tcensus/layout.hpp"
#include "tcensus/svm.hpp"

namespace tcensus {

using nlohmann::json;

inline constexpr int kLayoutFormatVersion = 1;
inline constexpr int kModelFormatVersion = 1;
inline constexpr int kDetectionFormatVersion = 1;

namespace detail {

inline void require_format(const json& j, std::string_view format, int version) {
  if (!j.is_object() || j.value("format", "") != format) {
    throw Error(ErrorCode::DecodeError, "expected a " + std::string(format) + " document");
  }
  if (j.value("version", 0) != version) {
    throw Error(ErrorCode::UnsupportedFormat,
                "unsupported " + std::string(format) + " version " + std::to_string(j.value("version", 0)));
  }
}

inline void append_hex(std::string& out, double v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int byte = 0; byte < 8; ++byte) {
    const auto b = static_cast<unsigned>(bits & 0xFFu);
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xFu]);
    bits >>= 8;
  }
}

inline int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw Error(ErrorCode::DecodeError, "invalid hex digit in weights");
}

}  // namespace detail

/// Little-endian IEEE-754 binary64, 16 hex digits per value.
inline std::string encode_f64le_hex(std::span<const double> values) {
  std::string out;
  out.reserve(values.size() * 16);
  for (const double v : values) detail::append_hex(out, v);
  return out;
}

inline std::vector<double> decode_f64le_hex(std::string_view hex) {
  if (hex.size() % 16 != 0) throw Error(ErrorCode::DecodeError, "weight blob length is not a multiple of 16");
  std::vector<double> out(hex.size() / 16);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int byte = 7; byte >= 0; --byte) {
      const std::size_t at = i * 16 + static_cast<std::size_t>(byte) * 2;
      bits = (bits << 8) | static_cast<std::uint64_t>(detail::hex_value(hex[at]) * 16 + detail::hex_value(hex[at + 1]));
    }
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

inline json layout_to_json(const BlockLayout& layout) {
  json blocks = json::array();
  for (const auto& b : layout.blocks) {
    json rects = json::array();
    for (const Rect& r : b.rects) {
      rects.push_back({{"top", r.top}, {"left", r.left}, {"height", r.height}, {"width", r.width}});
    }
    blocks.push_back({{"variant", std::string(to_string(b.variant))}, {"rects", std::move(rects)}});
  }
  return {{"format", "tcensus-layout"},
          {"version", kLayoutFormatVersion},
          {"window", {{"width", layout.window_width}, {"height", layout.window_height}}},
          {"descriptor", std::string(to_string(layout.descriptor))},
          {"blocks", std::move(blocks)}};
}

inline BlockLayout layout_from_json(const json& j) {
  detail::require_format(j, "tcensus-layout", kLayoutFormatVersion);
  try {
    BlockLayout layout;
    layout.window_width = j.at("window").at("width").get<int>();
    layout.window_height = j.at("window").at("height").get<int>();
    layout.descriptor = parse_descriptor(j.at("descriptor").get<std::string>());
    for (const json& b : j.at("blocks")) {
      ExtensionBlockStructure s{parse_variant(b.at("variant").get<std::string>()), {}};
      for (const json& r : b.at("rects")) {
        s.rects.push_back({r.at("top").get<int>(), r.at("left").get<int>(), r.at("height").get<int>(),
                           r.at("width").get<int>()});
      }
      layout.blocks.push_back(std::move(s));
    }
    layout.validate();
    return layout;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::DecodeError, std::string("layout document: ") + e.what());
  }
}

inline json model_to_json(const LinearModel& m) {
  const double bias[] = {m.bias};
  return {{"format", "tcensus-model"},
          {"version", kModelFormatVersion},
          {"layout", layout_to_json(m.layout)},
          {"normalized", m.normalized},
          {"bias_f64le", encode_f64le_hex(bias)},
          {"weights_f64le", encode_f64le_hex(m.weights)},
          {"training",
           {{"seed", m.info.seed},
            {"c_f64le", encode_f64le_hex(std::span<const double>(&m.info.c, 1))},
            {"rounds", m.info.rounds},
            {"epochs", m.info.epochs},
            {"positives", m.info.positives},
            {"negatives", m.info.negatives},
            {"hard_negatives", m.info.hard_negatives}}}};
}

inline LinearModel model_from_json(const json& j) {
  detail::require_format(j, "tcensus-model", kModelFormatVersion);
  try {
    LinearModel m;
    m.layout = layout_from_json(j.at("layout"));
    m.normalized = j.at("normalized").get<bool>();
    const auto bias = decode_f64le_hex(j.at("bias_f64le").get<std::string>());
    if (bias.size() != 1) throw Error(ErrorCode::DecodeError, "bias must hold one value");
    m.bias = bias[0];
    m.weights = decode_f64le_hex(j.at("weights_f64le").get<std::string>());
    if (m.weights.size() != m.layout.dimension()) {
      throw Error(ErrorCode::DecodeError, "weight count does not match the layout dimension");
    }
    const json& t = j.at("training");
    m.info.seed = t.at("seed").get<std::uint64_t>();
    const auto c = decode_f64le_hex(t.at("c_f64le").get<std::string>());
    if (c.size() != 1) throw Error(ErrorCode::DecodeError, "C must hold one value");
    m.info.c = c[0];
    m.info.rounds = t.at("rounds").get<int>();
    m.info.epochs = t.at("epochs").get<int>();
    m.info.positives = t.at("positives").get<std::size_t>();
    m.info.negatives = t.at("negatives").get<std::size_t>();
    m.info.hard_negatives = t.at("hard_negatives").get<std::size_t>();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::DecodeError, std::string("model document: ") + e.what());
  }
}

struct ImageDetections {
  std::string image;
  std::vector<Detection> detections;
};

inline json detections_to_json(std::span<const ImageDetections> results) {
  json dets = json::array();
  for (const auto& r : results) {
    for (const Detection& d : r.detections) {
      dets.push_back({{"image", r.image},
                      {"left", d.box.left},
                      {"top", d.box.top},
                      {"width", d.box.width},
                      {"height", d.box.height},
                      {"score", d.score},
                      {"level", d.level}});
    }
  }
  return {{"format", "tcensus-detections"}, {"version", kDetectionFormatVersion}, {"detections", std::move(dets)}};
}

/// "image left top width height score level", one detection per line.
inline std::string detections_to_lines(std::span<const ImageDetections> results) {
  std::string out;
  char buf[512];
  for (const auto& r : results) {
    for (const Detection& d : r.detections) {
      std::snprintf(buf, sizeof buf, " %d %d %d %d %.17g %d\n", d.box.left, d.box.top, d.box.width,
                    d.box.height, d.score, d.level);
      out += r.image;
      out += buf;
    }
  }
  return out;
}

}  // namespace tcensus
