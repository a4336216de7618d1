#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fatigue {

enum class ErrorCode {
  malformed_row,
  non_monotone_time,
  non_finite_value,
  too_few_samples,
  column_not_found,
  io,
  out_of_grid,
  index_out_of_range,
  empty_input,
  non_uniform_sampling,
  segment_too_long,
  invalid_config,
  invalid_argument,
  domain_error,
  degenerate_signal,
};

/// Coarse grouping used for process exit codes and C status codes.
enum class ErrorCategory { usage, data, numeric };

ErrorCategory category_of(ErrorCode code) noexcept;
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

// Warnings (absorbing Markov rows, clamped relay inputs, out-of-range
// correction factors) go through a process-wide sink. Default writes to stderr;
// an empty sink restores the default.
using WarningSink = std::function<void(std::string_view)>;
void set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace fatigue
