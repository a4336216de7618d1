#include "fatigue/error.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace fatigue {

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_config:
    case ErrorCode::invalid_argument:
      return ErrorCategory::usage;
    case ErrorCode::domain_error:
    case ErrorCode::degenerate_signal:
      return ErrorCategory::numeric;
    default:
      return ErrorCategory::data;
  }
}

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::malformed_row: return "MalformedRow";
    case ErrorCode::non_monotone_time: return "NonMonotoneTime";
    case ErrorCode::non_finite_value: return "NonFiniteValue";
    case ErrorCode::too_few_samples: return "TooFewSamples";
    case ErrorCode::column_not_found: return "ColumnNotFound";
    case ErrorCode::io: return "IoError";
    case ErrorCode::out_of_grid: return "OutOfGrid";
    case ErrorCode::index_out_of_range: return "IndexOutOfRange";
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::non_uniform_sampling: return "NonUniformSampling";
    case ErrorCode::segment_too_long: return "SegmentTooLong";
    case ErrorCode::invalid_config: return "InvalidConfig";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::domain_error: return "DomainError";
    case ErrorCode::degenerate_signal: return "DegenerateSignal";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

void to_stderr(std::string_view msg) { std::cerr << "warning: " << msg << '\n'; }

WarningSink& sink() {
  static WarningSink s = to_stderr;
  return s;
}

}  // namespace

void set_warning_sink(WarningSink s) {
  std::lock_guard lock(sink_mutex());
  sink() = s ? std::move(s) : WarningSink(to_stderr);
}

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex());
  sink()(message);
}

}  // namespace fatigue
