#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wise/density.hpp"
#include "wise/estimator.hpp"
#include "wise/projection_kernel.hpp"

namespace wise {

/// e_n^2 = 2^j int int R_n^2 over the whole line.
double e_n_squared(const MeanProjection& projection, const ScalingTable& table);

struct CovGridSpec {
  /// Nystrom node spacing 2^{-(j + grid_shift)} on [-M, M).
  int grid_shift = 4;
  /// Assemble the dense node matrices of C_n and R_n.
  bool dense = true;
};

/// C_n(t, s) = 2^j int K_n(t,x) K_n(s,x) f(x) dx and R_n, its centered
/// counterpart, in two representations:
///  - coefficient space, exact for the step-model table:
///      C_n(t, s) = 2^{-j} phi(t)^T Mom phi(s),  R_n = 2^{-j} phi(t)^T Cov phi(s),
///    with phi(t) the vector of phi_jk(t) and Cov = Mom - alpha alpha^T;
///  - optional dense matrices on uniform nodes of [-M, M) for the Nystrom spectrum.
struct CovKernels {
  int level = 0;
  double box_radius = 0.0;
  std::shared_ptr<const ScalingTable> table;
  std::shared_ptr<const MeanProjection> projection;

  std::int64_t k_first = 0;  // index 0 of the matrices below
  Eigen::SparseMatrix<double> moment;
  Eigen::SparseMatrix<double> gram_box;  // G_F for F = [-M, M)
  Eigen::SparseMatrix<double> gram_line;  // whole-line Gram
  Eigen::VectorXd alpha;

  int grid_shift = 0;
  double weight = 0.0;  // node spacing
  std::vector<double> nodes;
  Eigen::MatrixXd c_matrix;
  Eigen::MatrixXd r_matrix;

  double c_value(double t, double s) const;
  double r_value(double t, double s) const;
};

CovKernels cov_kernels(const DensityModel& density, const KernelEvaluator& evaluator, int level, double box_radius,
                       const CovGridSpec& spec = {});
CovKernels cov_kernels(std::shared_ptr<const MeanProjection> projection, const KernelEvaluator& evaluator,
                       double box_radius, const CovGridSpec& spec = {});

struct LemmaRow {
  std::string name;
  double value = 0.0;
  double bound = 0.0;  // NaN for report-only rows
  bool pass = true;
  /// The closed-form value is attained to 1e-12 (e.g. Haar with a uniform density).
  bool exact = false;
};

struct LemmaOptions {
  /// Probe count and t-cell shift for the sup of int_F |Kbar(t,x) Kbar(t,y)| dt.
  int product_probes = 24;
  int product_shift = 8;
};

struct LemmaReport {
  int level = 0;
  double box_radius = 0.0;
  double c_sq_box = 0.0;  // 2^j int int_{F^2} C_n^2
  double r_sq_box = 0.0;
  double c_minus_r_sq_box = 0.0;
  double c_sq_line = 0.0;
  double r_sq_line = 0.0;  // e_n^2
  double operator_norm = 0.0;  // largest eigenvalue of the operator R_{n,F}
  double target_box = 0.0;  // int_F f^2
  double target_line = 0.0;
  double limit_deviation = 0.0;  // |c_sq_box - target_box|
  double line_deviation_c = 0.0;
  double line_deviation_r = 0.0;
  std::vector<LemmaRow> rows;
  bool all_pass = true;
};

LemmaReport lemma_integrals(const CovKernels& cov, const DensityModel& density, const LemmaOptions& options = {});

/// Cross-level checks on a sequence of reports at increasing levels:
/// monotone decrease of the box deviation, and the rate bounds
///   |2^j int C_n^2 - int f^2| <= C 2^{-j alpha},
///   |2^j int R_n^2 - int f^2| <= C (2^{-j/2} + 2^{-j alpha}),
/// (n^{-delta} = 2^{-j}) with C fitted on the smallest level.
struct LemmaRateReport {
  std::vector<int> levels;
  bool deviation_monotone = true;
  double c_rate_constant = 0.0;
  double r_rate_constant = 0.0;
  bool c_rate_holds = true;
  bool r_rate_holds = true;
  /// slope of log2 |box deviation| against j (report only)
  double deviation_slope = 0.0;
};

LemmaRateReport lemma_rate_checks(std::span<const LemmaReport> reports, double holder_alpha);

struct SpectrumReport {
  int level = 0;
  double box_radius = 0.0;
  std::vector<double> eigenvalues;  // descending
  double sum_lambda_sq = 0.0;
  double hs_integral = 0.0;  // int int R_n^2 by the node quadrature
  double hs_relative_gap = 0.0;
  double sigma_sq_M = 0.0;  // 2 2^j sum lambda^2
  double min_eigenvalue = 0.0;
  bool psd_warning = false;  // some eigenvalue below -1e-8
  bool psd_ok = true;  // none below -1e-6
};

/// Eigenvalues h * eig(R) of the Nystrom discretization on the node grid
/// (h the node spacing), which approximate the operator eigenvalues.
/// Throws eigen-failure when the solver does not converge.
SpectrumReport spectrum(const CovKernels& cov);

/// Operator eigenvalues from the coefficient space, exact for the step model:
/// eig(2^{-j} S Cov S) with S = G_F^{1/2}.
std::vector<double> operator_eigenvalues(const CovKernels& cov);

/// Draws of 2^{j/2} sum_k lambda_k (Z_k^2 - 1) / sigma(M), dropping
/// eigenvalues below 1e-10 lambda_1 and clamping negatives to zero. Draw i
/// uses the counter stream (seed, i).
std::vector<double> chaos_sample(const SpectrumReport& spectrum, std::uint64_t seed, std::size_t draws);

struct IjnReport {
  int level = 0;
  double box_radius = 0.0;
  double i1 = 0.0;  // i >= 2A
  double i2 = 0.0;  // -2A <= i < 2A
  double i3 = 0.0;  // i < -2A
  double total = 0.0;
  double target = 0.0;  // int_{-M}^{M} f^2
  double deviation = 0.0;
};

/// sum_i 2^{-j} f(2^{-j}(x+i)) f(2^{-j}(x+i-u)) 1{2^{-j}(z+x+i) in F} 1{2^{-j}(w+x+i) in F},
/// split at i = 2A and i = -2A, with F = [-M, M].
IjnReport ijn_sum(const DensityModel& density, int support_radius, int level, double box_radius, double x, double u,
                  double z, double w);

/// CSV with columns k,lambda.
void write_spectrum_csv(const SpectrumReport& spectrum, std::ostream& out);

}  // namespace wise
