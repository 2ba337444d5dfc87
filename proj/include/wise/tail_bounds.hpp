#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wise/density.hpp"
#include "wise/projection_kernel.hpp"
#include "wise/wavelet_basis.hpp"

namespace wise {

/// Constants A, B, C, D of the exponential inequality for bounded canonical
/// two-variable kernels, specialised to H_{n,F} summed over m points.
struct TailBoundInputs {
  double a_const = 0.0;
  double b_const = 0.0;
  double c_const = 0.0;
  double d_const = 0.0;
  std::size_t m = 0;
  std::size_t n = 0;
  int level = 0;
  Interval window;
  double f_sq_window = 0.0;
};

TailBoundInputs glz_constants(const DensityModel& density, const MajorantSpec& majorant, int level, std::size_t m,
                              Interval window);

/// L exp(-min(x^2/C^2, x/D, x^{2/3}/B^{2/3}, x^{1/2}/A^{1/2}) / L)
double glz_tail(const TailBoundInputs& inputs, double x, double l_const);

/// Bound on P{|W_n(F)| >= tau n 2^{-3j/2}} with the six-term minimum.
double wn_tail_bound(double tau, double n, int level, double kappa0, double f_sq_window);

/// Iterated-log form: tau = eta sqrt(log log n) keeps only the first term.
double wn_tail_bound_loglog(double eta, double n, double kappa0, double f_sq_window);

/// Bernstein bound on P{|L_n| > tau n 2^{-3j/2}} for the diagonal sum over m points.
double bernstein_diag_bound(double tau, double m, double n, int level, double phi_l2sq);

/// Smallest constant c with bound(c, i) >= target[i] for all i, assuming
/// bound is nondecreasing in c. Returns the lower search limit when every
/// target is zero.
double calibrate_constant(const std::function<double(double, std::size_t)>& bound, std::span<const double> target,
                          double lo = 1e-6, double hi = 1e6);

struct TailRow {
  std::string kind;  // "bernstein_diag", "glz_offdiag", "wn_window"
  double tau = 0.0;
  double bound = 0.0;
  double empirical_freq = 0.0;
  std::size_t n = 0;
  int level = 0;
  bool below = true;  // empirical_freq <= bound
};

struct TailComparisonSpec {
  std::vector<std::size_t> n_list{512, 1024, 2048};
  std::size_t replications = 2000;
  std::vector<double> taus{0.5, 1.0, 2.0};
  double box_radius = 2.0;
  double delta = 0.2;
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
};

struct TailComparison {
  std::vector<TailRow> rows;
  double l_const = 0.0;  // calibrated on the smallest n, then frozen
  double kappa0 = 0.0;  // likewise
  bool all_below = true;
};

/// Monte Carlo frequencies of the diagonal, off-diagonal and windowed
/// statistics against their bounds. Replication r of size n uses the sample
/// stream (seed, r); levels follow the bandwidth schedule.
TailComparison tail_comparison(const DensityModel& density, const KernelEvaluator& evaluator,
                               const TailComparisonSpec& spec);

void write_tail_csv(const TailComparison& comparison, std::ostream& out);

struct ScalingReport {
  std::vector<int> levels;
  std::vector<double> e_h4;
  std::vector<double> e_h4_se;
  std::vector<double> e_g2;
  std::vector<double> e_g2_se;
  double slope_h4 = 0.0;
  double slope_h4_se = 0.0;
  double slope_g2 = 0.0;
  double slope_g2_se = 0.0;
};

struct MomentEstimate {
  double e_h4 = 0.0;
  double e_h4_se = 0.0;
  double e_g2 = 0.0;
  double e_g2_se = 0.0;
};

/// Sample means of H(x,y)^4 and G(x,y)^2 over the pairs (xs[2i], xs[2i+1]).
MomentEstimate moment_estimates(const std::function<double(double, double)>& h,
                                const std::function<double(double, double)>& g, std::span<const double> xs);

/// E H_n^4(X1,X2) and E G_n^2(X1,X2) per level from `pairs` Monte Carlo pairs,
/// with least-squares slopes of log2 estimate against j.
ScalingReport moment_scaling_probe(const DensityModel& density, const KernelEvaluator& evaluator,
                                   std::span<const int> levels, std::size_t pairs, std::uint64_t seed,
                                   unsigned threads = 1);

void write_scaling_csv(const ScalingReport& report, std::ostream& out);

}  // namespace wise
