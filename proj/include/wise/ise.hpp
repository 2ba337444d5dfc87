#pragma once

#include <cstddef>
#include <vector>

#include "wise/density.hpp"
#include "wise/estimator.hpp"
#include "wise/projection_kernel.hpp"

namespace wise {

/// K(2^j t, 2^j x) - int K(2^j t, 2^j y) f(y) dy, the expectation as a sum of
/// table values times cell masses over cells of width 2^{-(j+q)}, q =
/// quadrature_shift (default: the table resolution). Throws
/// quadrature-too-coarse for q < 2.
double centered_kernel_eval(const KernelEvaluator& evaluator, const DensityModel& density, int level, double t,
                            double x, int quadrature_shift = -1);

/// H_n(x, y) = int Kbar_n(t, x) Kbar_n(t, y) dt in closed form,
///   2^{-j} [K(2^j x, 2^j y) - m(x) - m(y) + q],
/// m(x) = int K(2^j x, 2^j y) f(y) dy, q = int int K(2^j u, 2^j v) f(u) f(v).
double hn_eval(const KernelEvaluator& evaluator, const MeanProjection& projection, double x, double y);

/// The same H_n by direct t-quadrature over cells of width 2^{-(j+r)}.
double hn_eval_brute(const KernelEvaluator& evaluator, const MeanProjection& projection, double x, double y);

/// I_n = int (f_n - f)^2, integrated exactly over the step-model cells.
double ise(const DensityEstimate& estimate, const DensityModel& density, const ScalingTable& table);
/// I_n = sum_k (alpha_hat_k - alpha_k)^2 + int (f - Pi_j f)^2.
double ise_coefficient(const DensityEstimate& estimate, const MeanProjection& projection);
/// E I_n = E ||f_n - E f_n||^2 + int (f - Pi_j f)^2.
double expected_ise(const MeanProjection& projection, std::size_t n);

struct IseBreakdown {
  int level = 0;
  std::size_t n = 0;
  double i_n = 0.0;
  double expected_i_n = 0.0;
  double j_n_stat = 0.0;  // I_n - E I_n
  double jbar = 0.0;
  double w_n = 0.0;
  double u_n = 0.0;
  double l_n = 0.0;
  double t_n = 0.0;  // n 2^{-j/2} jbar / sigma
  /// True when i_n came from the cell quadrature rather than the coefficient route.
  bool quadrature_i_n = false;
};

struct IseOptions {
  /// Integrate I_n over the step-model cells instead of using Parseval.
  bool quadrature_i_n = false;
};

/// Fast path: U_n, L_n and W_n = U_n + L_n from the level-j coefficient sums,
///   U_n = 2^{-2j} (sum_k S_k^2 - D),  L_n = 2^{-2j} (D - n sum_k Var_k),
/// S_k = n (alpha_hat_k - alpha_k), D = sum_i sum_k (phi_jk(X_i) - alpha_k)^2,
/// and jbar = 2^{2j} W_n / n^2. Throws mean-projection-required when the
/// projection does not match (density, level, table).
IseBreakdown jbar_statistic(const CoefficientAccumulator& sums, const DensityModel& density,
                            const MeanProjection& projection, const IseOptions& options = {});
IseBreakdown jbar_statistic(const Sample& sample, const KernelEvaluator& evaluator, const DensityModel& density,
                            int level, const MeanProjection& projection, const IseOptions& options = {});

struct PairStatistics {
  double u_n = 0.0;
  double l_n = 0.0;
  double w_n = 0.0;
};

/// O(n^2) pair loop over the closed-form H_n; oracle for the fast path.
PairStatistics pair_statistics_brute(const Sample& sample, const KernelEvaluator& evaluator,
                                     const MeanProjection& projection);

struct MartingaleDecomposition {
  int level = 0;
  std::size_t n = 0;
  double e_n_sq = 0.0;  // 2^j int int R_n^2
  double s_n_sq = 0.0;  // n(n-1)/2 2^{-3j} e_n^2
  /// sum_{i=2}^n sum_{j<i} E H_n^2(X_i, X_j) with E H_n^2 as a cell sum
  double s_n_sq_direct = 0.0;
  double expected_h_sq = 0.0;
  std::vector<double> x_ni;  // x_ni[0] = 0 (i = 1 has no predecessors)
  double u_nn = 0.0;  // sum_{i>j} H_n(X_i, X_j)
  double s_nn = 0.0;  // u_nn / s_n
};

/// E H_n(X_1, X_2)^2 by a cell sum over x of E_Y H_n(x, Y)^2.
double expected_h_squared(const MeanProjection& projection, const DensityModel& density, const ScalingTable& table);

/// Throws need-two-points for n < 2 and mean-projection-required.
MartingaleDecomposition martingale_decompose(const Sample& sample, const KernelEvaluator& evaluator,
                                             const DensityModel& density, int level,
                                             const MeanProjection& projection);

/// U_n(F), L_n(F), W_n(F) for F = [-M, M) with the t-integrals restricted to F.
struct RestrictedW {
  double box_radius = 0.0;
  double u_n = 0.0;
  double l_n = 0.0;
  double w_n = 0.0;
};

RestrictedW wn_restricted(const Sample& sample, const KernelEvaluator& evaluator, const MeanProjection& projection,
                          double box_radius);
/// Same via the O(n^2) pair loop over H_{n,F}.
RestrictedW wn_restricted_brute(const Sample& sample, const KernelEvaluator& evaluator,
                                const MeanProjection& projection, double box_radius);

/// Precomputed pieces for repeated W_n(F) evaluations at one (density, level, F).
class RestrictedWEvaluator {
 public:
  RestrictedWEvaluator(const KernelEvaluator& evaluator, const MeanProjection& projection, double box_radius);
  RestrictedW operator()(std::span<const double> xs) const;
  /// H_{n,F}(x, y)
  double h(double x, double y) const;

 private:
  std::shared_ptr<const ScalingTable> table_;
  const MeanProjection* projection_;
  double box_radius_;
  BandGram gram_;
  std::int64_t k_first_ = 0;
  std::vector<double> gram_alpha_;  // (G_F alpha)_k over [k_first_, ...)
  double alpha_gram_alpha_ = 0.0;
  double trace_gram_cov_ = 0.0;
};

}  // namespace wise
