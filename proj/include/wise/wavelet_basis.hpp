#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace wise {

enum class WaveletFamily { haar, daubechies };

std::string_view family_name(WaveletFamily family) noexcept;
/// Accepts "haar" and "daubechies" (alias "db"); throws invalid-config.
WaveletFamily parse_family(std::string_view name);

inline constexpr int kMaxOrder = 10;
inline constexpr int kMaxSupport = 2 * kMaxOrder - 1;

/// Largest j + r for which scaled grid indices floor(2^{j+r} x) are formed.
inline constexpr int kMaxScaledBits = 40;

/// floor(2^bits * x) as an integer grid index.
inline std::int64_t dyadic_floor(double x, int bits) noexcept {
  return static_cast<std::int64_t>(std::floor(std::ldexp(x, bits)));
}

/// Low-pass filter h_0..h_{2N-1} of a compactly supported orthonormal
/// scaling function, phi(x) = sqrt(2) sum_k h_k phi(2x - k).
struct WaveletFilter {
  WaveletFamily family = WaveletFamily::haar;
  int order = 1;  // N, number of vanishing moments
  std::vector<double> coefficients;

  /// Length of the support [0, 2N-1] of phi; also the majorant radius A.
  int support_length() const noexcept { return 2 * order - 1; }
};

/// Haar requires order 1. Daubechies orders 1..10 come from spectral
/// factorization of the Daubechies polynomial, taking the zeros outside the
/// unit circle so that h_0 is the leading (largest-phase) tap of the usual
/// convention, e.g. D2 = (1+sqrt3, 3+sqrt3, 3-sqrt3, 1-sqrt3)/(4 sqrt2).
WaveletFilter make_filter(WaveletFamily family, int order);

struct CascadeOptions {
  int resolution = 12;
  std::size_t max_entries = std::size_t{1} << 26;
};

/// phi(u - k) for the translates that can be nonzero at a grid point.
struct Translates {
  std::int64_t k_first = 0;
  int count = 0;
  std::array<double, kMaxSupport> value{};
};

/// Values of phi and psi on the dyadic grid k / 2^r over [0, 2N-1].
///
/// Off-grid arguments are evaluated at the grid point at or below them, so the
/// table represents the right-continuous step function
///   phi_r(x) = phi(floor(2^r x) / 2^r),
/// which equals phi at every dyadic of level r and differs from it by
/// O(2^{-alpha r}) elsewhere (alpha the Hölder exponent of phi). Every
/// quadrature in the library is exact for this step function.
class ScalingTable {
 public:
  ScalingTable(WaveletFilter filter, int resolution, std::vector<double> phi, std::vector<double> psi);

  const WaveletFilter& filter() const noexcept { return filter_; }
  int resolution() const noexcept { return resolution_; }
  std::int64_t per_unit() const noexcept { return std::int64_t{1} << resolution_; }
  int support_length() const noexcept { return filter_.support_length(); }

  std::span<const double> phi() const noexcept { return phi_; }
  std::span<const double> psi() const noexcept { return psi_; }

  double phi_at_index(std::int64_t i) const noexcept {
    return (i >= 0 && i < static_cast<std::int64_t>(phi_.size())) ? phi_[static_cast<std::size_t>(i)] : 0.0;
  }
  double phi_at(double x) const noexcept;
  double psi_at(double x) const noexcept;

  /// Translates of phi at the grid point g / 2^r.
  Translates translates(std::int64_t g) const noexcept;

  double sup_norm() const noexcept { return sup_norm_; }
  /// Sum of |jumps| over the grid including the jumps to zero at both ends.
  /// A lower estimate of the total variation that increases with r.
  double tv_norm() const noexcept { return tv_norm_; }
  /// max over the grid of sum_k |phi(x - k)|.
  double theta_sup() const noexcept { return theta_sup_; }

 private:
  WaveletFilter filter_;
  int resolution_;
  std::vector<double> phi_;
  std::vector<double> psi_;
  double sup_norm_ = 0.0;
  double tv_norm_ = 0.0;
  double theta_sup_ = 0.0;
};

/// Integer values from the eigenvalue-1 eigenvector of the refinement matrix,
/// then dyadic refinement level by level through the two-scale relation.
ScalingTable cascade(const WaveletFilter& filter, const CascadeOptions& options = {});

struct BasisReport {
  double sup_norm = 0.0;
  double tv_norm = 0.0;
  double theta_sup = 0.0;
  double l2_norm_sq = 0.0;
  /// max_k |int phi(x) phi(x-k) dx - delta_0k|
  double orthonormality_residual = 0.0;
  /// max over the grid of |sum_k phi(x-k) - 1|
  double partition_residual = 0.0;
  /// max over the grid of |phi(x) - sqrt2 sum h_k phi(2x-k)|
  double two_scale_residual = 0.0;
};

BasisReport basis_diagnostics(const ScalingTable& table);

/// Phi(u) = height * 1{|u| <= radius}, with |K(x,y)| <= Phi(x - y).
struct MajorantSpec {
  int radius = 0;
  double height = 0.0;
  double l1_norm = 0.0;
  double l2_sq = 0.0;

  double operator()(double u) const noexcept { return (u >= -radius && u <= radius) ? height : 0.0; }
};

MajorantSpec make_majorant(const ScalingTable& table);

/// Versioned CSV cache: a "# wise-scaling-table v1 ..." header line, then
/// columns grid_index,phi,psi. Values are written in shortest round-trip form.
void write_table_csv(const ScalingTable& table, std::ostream& out);
ScalingTable read_table_csv(std::istream& in);

}  // namespace wise
