#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace movi {

enum class ErrorCode {
  malformed_row,
  non_monotonic_time,
  bad_quaternion,
  empty_input,
  bad_config,
  too_few_samples,
  bad_window,
  bad_density,
  bad_style,
  unknown_entity_kind,
  inconsistent_entities,
  bad_staging,
  bad_spec,
  decode_error,
  invalid_recording,
  io_error,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed_row: return "MalformedRow";
    case ErrorCode::non_monotonic_time: return "NonMonotonicTime";
    case ErrorCode::bad_quaternion: return "BadQuaternion";
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::bad_config: return "BadConfig";
    case ErrorCode::too_few_samples: return "TooFewSamples";
    case ErrorCode::bad_window: return "BadWindow";
    case ErrorCode::bad_density: return "BadDensity";
    case ErrorCode::bad_style: return "BadStyle";
    case ErrorCode::unknown_entity_kind: return "UnknownEntityKind";
    case ErrorCode::inconsistent_entities: return "InconsistentEntities";
    case ErrorCode::bad_staging: return "BadStaging";
    case ErrorCode::bad_spec: return "BadSpec";
    case ErrorCode::decode_error: return "DecodeError";
    case ErrorCode::invalid_recording: return "InvalidRecording";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (CLI exit codes, HTTP error bodies) can map it without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace movi
