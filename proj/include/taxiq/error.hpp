// error.hpp
//
// Error codes shared by every module. Each code belongs to a category that
// the command-line front-end maps to an exit status.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace taxiq {

enum class ErrorCode {
  nonfinite_value,
  nonpositive_rate,
  nonpositive_cost,
  nonpositive_money,
  invalid_capacity,
  mu1_not_less_than_mu2,
  matching_times_not_increasing,
  matching_time_not_integer,
  reward_not_above_price,
  invalid_probability,
  invalid_threshold,
  state_out_of_range,
  invalid_config,
  degenerate_intensity,
  unstable,
  no_convergence,
  usage,
};

enum class ErrorCategory { validation, numerical, usage };

std::string_view to_string(ErrorCode code) noexcept;
ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace taxiq
