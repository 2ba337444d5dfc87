#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wise/density.hpp"
#include "wise/projection_kernel.hpp"

namespace wise {

/// Resolution schedule with j_n constant on blocks [lambda_k, lambda_{k+1}),
/// lambda_k = exp(k / log(e + k)), k >= 0.
class BandwidthSchedule {
 public:
  BandwidthSchedule(double delta, double multiplier);

  double delta() const noexcept { return delta_; }
  double multiplier() const noexcept { return multiplier_; }

  static double log_lambda(std::int64_t k) noexcept;
  static double lambda(std::int64_t k) noexcept;

  /// Largest k >= 0 with lambda_k <= n (0 for n < lambda_1).
  std::int64_t block(double n) const noexcept;
  /// round(delta log2 lambda_k - log2 multiplier), floored at 0.
  int level_for_block(std::int64_t k) const noexcept;
  int level(double n) const noexcept { return level_for_block(block(n)); }

 private:
  double delta_;
  double multiplier_;
};

/// delta must lie in (0, 1/3) (delta-out-of-range) and multiplier > 0.
BandwidthSchedule make_schedule(double delta, double multiplier = 1.0);

/// Level-j sums over a growing sample: s_k = sum_i phi(2^j X_i - k) and
/// sum_i sum_k phi(2^j X_i - k)^2. Adding a point costs O(2N - 1).
class CoefficientAccumulator {
 public:
  CoefficientAccumulator(std::shared_ptr<const ScalingTable> table, int level);

  void add(double x);
  void add(std::span<const double> xs);

  const ScalingTable& table() const noexcept { return *table_; }
  int level() const noexcept { return level_; }
  std::size_t count() const noexcept { return count_; }
  std::int64_t k_first() const noexcept { return k_first_; }
  std::int64_t k_end() const noexcept { return k_first_ + static_cast<std::int64_t>(sums_.size()); }
  std::span<const double> sums() const noexcept { return sums_; }
  double sum(std::int64_t k) const noexcept {
    return (k >= k_first_ && k < k_end()) ? sums_[static_cast<std::size_t>(k - k_first_)] : 0.0;
  }
  double phi_sq_total() const noexcept { return phi_sq_total_; }
  /// alpha-hat_k = 2^{j/2} s_k / n
  double alpha_hat(std::int64_t k) const noexcept;

 private:
  std::shared_ptr<const ScalingTable> table_;
  int level_;
  std::size_t count_ = 0;
  std::int64_t k_first_ = 0;
  std::vector<double> sums_;
  double phi_sq_total_ = 0.0;
};

struct EstimateOptions {
  /// Evaluation grid step 2^{-(j + grid_shift)}.
  int grid_shift = 6;
  bool with_grid = true;
  /// Also evaluate the kernel form (2^j/n) sum_i K(2^j x, 2^j X_i), O(n) per node.
  bool kernel_form = true;
};

struct DensityEstimate {
  int level = 0;
  std::size_t n = 0;
  std::int64_t k_first = 0;
  std::vector<double> alpha_hat;  // alpha_hat[i] is the coefficient of k_first + i
  int grid_shift = 0;
  std::int64_t grid_first = 0;  // node m sits at (grid_first + m) 2^{-(j + grid_shift)}
  std::vector<double> grid_values;  // coefficient form
  std::vector<double> kernel_values;  // kernel form when requested
  double form_discrepancy = 0.0;  // max |coefficient form - kernel form|

  double coefficient(std::int64_t k) const noexcept;
  double grid_x(std::size_t m) const noexcept;
};

/// Throws empty-sample and level-too-fine.
DensityEstimate estimate(const Sample& sample, const KernelEvaluator& evaluator, int level,
                         const EstimateOptions& options = {});

/// sum_k alpha_hat_k 2^{j/2} phi(2^j x - k)
double evaluate_estimate(const DensityEstimate& est, const ScalingTable& table, double x);
/// int f_n = sum_k alpha_hat_k 2^{-j/2} int phi_r
double estimate_mass(const DensityEstimate& est, const ScalingTable& table);

/// CSV with columns x,f_hat over the evaluation grid.
void write_estimate_csv(const DensityEstimate& est, std::ostream& out);
/// CSV with columns k,alpha_hat.
void write_coefficients_csv(const DensityEstimate& est, std::ostream& out);

/// Exact level-j moments of phi_jk(X) for the step-model table:
///   alpha_k = E phi_jk(X), moment(k, d) = E phi_jk(X) phi_j,k+d(X), 0 <= d < 2N-1.
/// All integrals are cell sums over cells of width 2^{-(j+r)} weighted by
/// probability masses, which is exact because phi_r is constant on each cell.
struct MeanProjection {
  int level = 0;
  int resolution = 0;
  int support = 1;  // 2N - 1
  std::string density_name;
  std::int64_t k_first = 0;
  std::vector<double> alpha;
  std::vector<double> moments;  // row-major [k - k_first][d]
  std::vector<double> variance;  // Var phi_jk(X)
  /// gram[d] = int phi_r(x) phi_r(x - d) dx, the level-independent Gram band.
  std::vector<double> gram;
  double alpha_sq_sum = 0.0;
  double variance_sum = 0.0;
  /// int (Pi_j f - f)^2 with Pi_j f = sum_k alpha_k phi_jk.
  double bias_ise = 0.0;
  /// sum_{k,l} gram(k,l) Cov(k,l) = E ||f_n - E f_n||^2 times n
  double trace_gram_cov = 0.0;
  double l2_sq = 0.0;

  std::int64_t k_end() const noexcept { return k_first + static_cast<std::int64_t>(alpha.size()); }
  double alpha_at(std::int64_t k) const noexcept {
    return (k >= k_first && k < k_end()) ? alpha[static_cast<std::size_t>(k - k_first)] : 0.0;
  }
  /// E phi_jk phi_jl; zero once |k - l| >= 2N - 1.
  double moment_at(std::int64_t k, std::int64_t l) const noexcept;
  /// Cov(phi_jk(X), phi_jl(X)) = moment - alpha_k alpha_l (not banded).
  double cov_at(std::int64_t k, std::int64_t l) const noexcept { return moment_at(k, l) - alpha_at(k) * alpha_at(l); }
  /// E f_n(x) = sum_k alpha_k phi_jk(x)
  double mean_at(const ScalingTable& table, double x) const;
};

MeanProjection projection_mean(const DensityModel& density, const KernelEvaluator& evaluator, int level);

/// Gram band G_F(k, k+d) = int_F phi_jk phi_j,k+d, 0 <= d < 2N-1, for the
/// step-model table. The whole-line form is the same band for every k.
class BandGram {
 public:
  static BandGram whole_line(const ScalingTable& table, int level);
  /// F = [lo, hi), snapped outward to cells of width 2^{-(j+r)}.
  static BandGram restricted(const ScalingTable& table, int level, double lo, double hi);

  bool whole() const noexcept { return whole_; }
  int support() const noexcept { return support_; }
  /// Rows with a nonzero entry (restricted form only).
  std::int64_t k_first() const noexcept { return k_first_; }
  std::int64_t k_end() const noexcept { return k_first_ + static_cast<std::int64_t>(rows_); }
  double at(std::int64_t k, std::int64_t l) const noexcept;

 private:
  bool whole_ = true;
  int support_ = 1;
  std::int64_t k_first_ = 0;
  std::size_t rows_ = 0;
  std::vector<double> band_;
};

/// Throws mean-projection-required unless `projection` was built for this
/// density, level and table resolution.
void require_projection(const MeanProjection& projection, const DensityModel& density, const ScalingTable& table,
                        int level);

}  // namespace wise
