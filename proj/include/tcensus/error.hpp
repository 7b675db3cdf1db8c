#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tcensus {

enum class ErrorCode {
  ImageTooSmall,
  OutOfBounds,
  InsufficientData,
  DegenerateData,
  NoNegatives,
  LayoutNotGridded,
  WindowTooLarge,
  EmptyReference,
  EmptySet,
  EmptyScores,
  DecodeError,
  UnsupportedFormat,
  InvalidConfig,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::NoNegatives: return "NoNegatives";
    case ErrorCode::LayoutNotGridded: return "LayoutNotGridded";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::EmptyReference: return "EmptyReference";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::EmptyScores: return "EmptyScores";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the toolkit carries a machine-readable category.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tcensus
