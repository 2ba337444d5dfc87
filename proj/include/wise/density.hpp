#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wise {

enum class DensityFamily { uniform, gaussian, laplace, triangular };

/// Tail mass per side treated as negligible when choosing quadrature windows.
inline constexpr double kTailEpsilon = 1e-12;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// A test density with analytic pdf, cdf, quantile and the antiderivative of
/// f^2. Parameters:
///   uniform(a, b)        half-open support [a, b)
///   gaussian(mu, sigma)
///   laplace(mu, b)       scale b
///   triangular(a, c, b)  mode c
class DensityModel {
 public:
  DensityModel(DensityFamily family, std::vector<double> params);

  DensityFamily family() const noexcept { return family_; }
  const std::vector<double>& params() const noexcept { return params_; }
  /// e.g. "gaussian(0,1)"
  const std::string& name() const noexcept { return name_; }

  double pdf(double x) const noexcept;
  double cdf(double x) const noexcept;
  /// P(X >= x), accurate in the right tail.
  double survival(double x) const noexcept;
  double quantile(double u) const noexcept;
  /// P(lo <= X < hi) without cancellation in either tail.
  double mass(double lo, double hi) const noexcept;
  /// int_{-inf}^x f^2
  double sq_cdf(double x) const noexcept;
  /// int_lo^hi f^2
  double sq_mass(double lo, double hi) const noexcept;

  double l2_sq() const noexcept { return l2_sq_; }
  double sup_norm() const noexcept { return sup_norm_; }
  double holder_alpha() const noexcept { return holder_alpha_; }
  /// Smallest L >= 0 with f nondecreasing on (-inf, -L] and nonincreasing
  /// on [L, inf).
  double tail_point() const noexcept { return tail_point_; }
  /// Interval outside which each tail carries mass below kTailEpsilon.
  Interval support_window() const noexcept { return window_; }

 private:
  DensityFamily family_;
  std::vector<double> params_;
  std::string name_;
  double l2_sq_ = 0.0;
  double sup_norm_ = 0.0;
  double holder_alpha_ = 1.0;
  double tail_point_ = 0.0;
  Interval window_;
};

std::string_view density_family_name(DensityFamily family) noexcept;

/// name in {uniform, gaussian, laplace, triangular}; throws
/// invalid-density-params on unknown names, wrong arity or invalid values.
DensityModel make_density(std::string_view name, std::span<const double> params);

/// Parses "gaussian(0,1)"-style text.
DensityModel parse_density(std::string_view spec);

struct Sample {
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string density_name;
  std::size_t n = 0;
};

/// Inverse-cdf draws from the counter stream (seed, stream); value i depends
/// only on (seed, stream, i).
Sample sample(const DensityModel& density, std::size_t n, std::uint64_t seed, std::uint64_t stream = 0);

struct FunctionalReport {
  double l2_sq = 0.0;
  double sigma_sq = 0.0;  // 2 int f^2
  double l2_fourth = 0.0;  // ||f||_2^4
  double box_radius = 0.0;  // M, F = [-M, M]
  double mass_in_box = 0.0;
  double l2_sq_in_box = 0.0;
  double mass_outside_box = 0.0;
  double l2_sq_outside_box = 0.0;
};

/// Throws window-too-small when either tail beyond `window` carries more than
/// kTailEpsilon.
FunctionalReport density_integrals(const DensityModel& density, Interval window, double box_radius);

}  // namespace wise
