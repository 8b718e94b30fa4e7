#pragma once

#include <stdexcept>
#include <string>

namespace beam {

enum class ErrorCode {
  InvalidArgument,
  FrameMismatch,
  PointAtInfinity,
  DegenerateConfiguration,
  InsufficientCorrespondences,
  BehindCamera,
  NonPositiveInput,
  NonPositiveDistance,
  TangentSingularity,
  OutOfRange,
  NoMarkersVisible,
  ConfigInvalid,
  EmptyTrace,
  DegenerateHomography,
  AngleOutOfRange,
  NoEdgeFound,
  ProfileTooShort,
  NoHalfContrastCrossing,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure in the core is reported as an Error carrying one of the codes
// above. The C API maps the code one-to-one onto beam_status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::PointAtInfinity: return "PointAtInfinity";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::InsufficientCorrespondences: return "InsufficientCorrespondences";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::NonPositiveDistance: return "NonPositiveDistance";
    case ErrorCode::TangentSingularity: return "TangentSingularity";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NoMarkersVisible: return "NoMarkersVisible";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::DegenerateHomography: return "DegenerateHomography";
    case ErrorCode::AngleOutOfRange: return "AngleOutOfRange";
    case ErrorCode::NoEdgeFound: return "NoEdgeFound";
    case ErrorCode::ProfileTooShort: return "ProfileTooShort";
    case ErrorCode::NoHalfContrastCrossing: return "NoHalfContrastCrossing";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace beam
