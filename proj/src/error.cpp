#include "wise/error.hpp"

namespace wise {

std::string_view code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::unsupported_order: return "unsupported-order";
    case ErrorCode::cascade_init: return "cascade-init";
    case ErrorCode::resolution_cap: return "resolution-cap";
    case ErrorCode::quadrature_too_coarse: return "quadrature-too-coarse";
    case ErrorCode::invalid_density_params: return "invalid-density-params";
    case ErrorCode::empty_sample: return "empty-sample";
    case ErrorCode::window_too_small: return "window-too-small";
    case ErrorCode::delta_out_of_range: return "delta-out-of-range";
    case ErrorCode::level_too_fine: return "level-too-fine";
    case ErrorCode::mean_projection_required: return "mean-projection-required";
    case ErrorCode::need_two_points: return "need-two-points";
    case ErrorCode::degenerate_window: return "degenerate-window";
    case ErrorCode::eigen_failure: return "eigen-failure";
    case ErrorCode::trajectory_too_short: return "trajectory-too-short";
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::io_failure: return "io-failure";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(code_name(code)) + ": " + detail), code_(code) {}

}  // namespace wise
