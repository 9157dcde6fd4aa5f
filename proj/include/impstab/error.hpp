#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace impstab {

enum class ErrorCode {
    invalid_argument,
    no_roots,
    divisor_zero,
    pole_on_grid,
    value_near_zero,
    grid_too_sparse,
    grid_mismatch,
    non_proper_ratio,
    pole_on_axis,
    ambiguous_orientation,
    precondition_rhp_poles,
    open_loop_rhp_poles,
    invalid_spec,
    parse_error,
    non_monotone_frequency,
    non_finite,
    io_error,
};

[[nodiscard]] std::string_view to_string(ErrorCode code);

// All library failures surface as this type; code() lets callers branch without parsing text.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace impstab
