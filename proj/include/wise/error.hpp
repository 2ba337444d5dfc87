#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wise {

enum class ErrorCode {
  unsupported_order,
  cascade_init,
  resolution_cap,
  quadrature_too_coarse,
  invalid_density_params,
  empty_sample,
  window_too_small,
  delta_out_of_range,
  level_too_fine,
  mean_projection_required,
  need_two_points,
  degenerate_window,
  eigen_failure,
  trajectory_too_short,
  invalid_config,
  io_failure,
};

/// Stable kebab-case identifier, e.g. "unsupported-order".
std::string_view code_name(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// message is "<code-name>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wise
