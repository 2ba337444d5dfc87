#pragma once

#include <cstdint>
#include <memory>

#include "wise/wavelet_basis.hpp"

namespace wise {

/// K(x, y) = sum_k phi(x - k) phi(y - k) over the step-model table.
class KernelEvaluator {
 public:
  explicit KernelEvaluator(std::shared_ptr<const ScalingTable> table);

  const ScalingTable& table() const noexcept { return *table_; }
  const std::shared_ptr<const ScalingTable>& table_ptr() const noexcept { return table_; }
  int support_radius() const noexcept { return table_->support_length(); }
  int resolution() const noexcept { return table_->resolution(); }

  /// K at the table grid points (gx / 2^r, gy / 2^r). The k-sum runs in
  /// ascending k over the translates shared by both points, so the result is
  /// exactly symmetric.
  double at_grid(std::int64_t gx, std::int64_t gy) const noexcept;

  double operator()(double x, double y) const noexcept;

  /// K(2^j x, 2^j y). Throws level-too-fine when j + r exceeds kMaxScaledBits.
  double scaled(int j, double x, double y) const;

  /// Throws level-too-fine unless 0 <= j and j + r <= kMaxScaledBits.
  void check_level(int j) const;

 private:
  std::shared_ptr<const ScalingTable> table_;
};

double kernel_eval(const KernelEvaluator& evaluator, double x, double y);

struct KernelCheckSpec {
  int probe_points = 50;
  /// Cell level for the reproducing-identity x-integral; clamped to r.
  int reproducing_level = 12;
  std::size_t majorant_pairs = 10000;
  std::uint64_t seed = 20240601;
  /// Cell level of the collapsed double integral int_0^1 int K(x, x-u)^2.
  int quadruple_fast_level = 8;
  /// Cell level of the four-fold tensor quadrature; negative skips it.
  int quadruple_brute_level = 6;
};

struct KernelIdentityReport {
  int probe_points = 0;
  /// max_{y,z} |int K(x,y) K(x,z) dx - K(y,z)| over the probe grid
  double reproducing_residual = 0.0;
  /// max |K(y+1, z+1) - K(y, z)| over the probe grid
  double periodicity_residual = 0.0;
  /// max |K(y, z) - K(z, y)| over the probe grid
  double symmetry_residual = 0.0;
  std::size_t majorant_pairs = 0;
  std::size_t majorant_violations = 0;
  double quadruple_fast = 0.0;
  int quadruple_fast_level = 0;
  bool brute_evaluated = false;
  double quadruple_brute = 0.0;
  int quadruple_brute_level = 0;
};

KernelIdentityReport kernel_identity_checks(const KernelEvaluator& evaluator, const KernelCheckSpec& spec = {});

}  // namespace wise
