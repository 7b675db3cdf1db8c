#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tcensus/error.hpp"
#include "tcensus/image.hpp"

namespace tcensus {

/// Integer luminance: round(0.299 R + 0.587 G + 0.114 B).
constexpr std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes to a sibling temp file, then renames over the target.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename onto " + path.string() + ": " + ec.message());
}

namespace detail {

class PnmReader {
 public:
  explicit PnmReader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view magic() {
    if (bytes_.size() < 2 || bytes_[0] != 'P') throw Error(ErrorCode::UnsupportedFormat, "not a PNM file");
    pos_ = 2;
    return bytes_.substr(0, 2);
  }

  int header_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      throw Error(ErrorCode::DecodeError, "malformed PNM header");
    }
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1'000'000'000) throw Error(ErrorCode::DecodeError, "PNM header value too large");
    }
    return static_cast<int>(v);
  }

  /// Single whitespace byte separating the header from binary data.
  void end_header() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw Error(ErrorCode::DecodeError, "malformed PNM header");
    }
    ++pos_;
  }

  std::string_view rest() const { return bytes_.substr(pos_); }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

inline GrayImage decode_pnm(std::string_view bytes) {
  PnmReader r(bytes);
  const std::string_view magic = r.magic();
  if (magic != "P2" && magic != "P5" && magic != "P6") {
    throw Error(ErrorCode::UnsupportedFormat, "unsupported PNM variant " + std::string(magic));
  }
  const int width = r.header_int();
  const int height = r.header_int();
  const int maxval = r.header_int();
  if (width <= 0 || height <= 0) throw Error(ErrorCode::DecodeError, "PNM has empty dimensions");
  if (maxval <= 0 || maxval > 255) throw Error(ErrorCode::UnsupportedFormat, "only 8-bit PNM is supported");
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> pixels(n);
  if (magic == "P2") {
    for (std::size_t i = 0; i < n; ++i) {
      const int v = r.header_int();
      if (v > maxval) throw Error(ErrorCode::DecodeError, "PGM sample exceeds maxval");
      pixels[i] = static_cast<std::uint8_t>(v);
    }
    return GrayImage(width, height, std::move(pixels));
  }
  r.end_header();
  const std::string_view data = r.rest();
  const std::size_t channels = magic == "P6" ? 3 : 1;
  if (data.size() < n * channels) throw Error(ErrorCode::DecodeError, "truncated PNM pixel data");
  for (std::size_t i = 0; i < n; ++i) {
    const auto* px = reinterpret_cast<const std::uint8_t*>(data.data()) + i * channels;
    pixels[i] = channels == 3 ? luminance(px[0], px[1], px[2]) : px[0];
  }
  return GrayImage(width, height, std::move(pixels));
}

inline GrayImage decode_png(std::string_view bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::DecodeError, std::string("PNG header: ") + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const bool alpha = (image.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  image.format = color ? (alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB) : (alpha ? PNG_FORMAT_GA : PNG_FORMAT_GRAY);
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(ErrorCode::DecodeError, std::string("PNG data: ") + image.message);
  }
  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);
  const std::size_t channels = PNG_IMAGE_PIXEL_CHANNELS(image.format);
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const std::uint8_t* px = buffer.data() + i * channels;
    pixels[i] = color ? luminance(px[0], px[1], px[2]) : px[0];
  }
  return GrayImage(width, height, std::move(pixels));
}

}  // namespace detail

/// Decodes PGM/PPM (P2, P5, P6) or PNG by content. Color is reduced with luminance().
inline GrayImage decode_image(std::string_view bytes) {
  static constexpr std::string_view kPngSignature("\x89PNG\r\n\x1a\n", 8);
  if (bytes.substr(0, 8) == kPngSignature) return detail::decode_png(bytes);
  if (!bytes.empty() && bytes[0] == 'P') return detail::decode_pnm(bytes);
  throw Error(ErrorCode::UnsupportedFormat, "neither PNM nor PNG");
}

inline GrayImage load_image(const std::filesystem::path& path) {
  try {
    return decode_image(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

inline std::string encode_pgm(const Raster<std::uint8_t>& pixels) {
  std::ostringstream out;
  out << "P5\n" << pixels.width() << ' ' << pixels.height() << "\n255\n";
  std::string s = out.str();
  s.append(reinterpret_cast<const char*>(pixels.data().data()), pixels.data().size());
  return s;
}

inline void write_pgm(const std::filesystem::path& path, const Raster<std::uint8_t>& pixels) {
  write_file_atomic(path, encode_pgm(pixels));
}

inline void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  write_pgm(path, img.raster());
}

inline bool is_image_path(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".pgm" || ext == ".ppm" || ext == ".pnm" || ext == ".png";
}

/// Image files directly inside `dir`, sorted by name.
inline std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::IoError, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image_path(entry.path())) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace tcensus
