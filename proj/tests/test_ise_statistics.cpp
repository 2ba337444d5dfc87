#include <doctest.h>

#include <cmath>
#include <memory>

#include "wise/estimator.hpp"
#include "wise/ise.hpp"
#include "wise/numeric.hpp"
#include "wise/rng.hpp"

using namespace wise;

namespace {

std::shared_ptr<const ScalingTable> table(WaveletFamily f, int order, int r) {
  return std::make_shared<const ScalingTable>(cascade(make_filter(f, order), CascadeOptions{r}));
}

// Haar/uniform: Kbar(t,x) = 1{same cell} - 2^{-j} on [0,1), so H = 2^{-j} 1{same cell} - 2^{-2j}
double haar_uniform_h(int j, double x, double y) {
  const double s = std::ldexp(1.0, j);
  return (std::floor(s * x) == std::floor(s * y) ? 1.0 / s : 0.0) - 1.0 / (s * s);
}

}  // namespace

TEST_CASE("haar/uniform pair kernel values") {
  const KernelEvaluator ev(table(WaveletFamily::haar, 1, 4));
  const DensityModel u = parse_density("uniform(0,1)");
  const MeanProjection p1 = projection_mean(u, ev, 1);
  CHECK(hn_eval(ev, p1, 0.1, 0.2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(hn_eval(ev, p1, 0.1, 0.7) == doctest::Approx(-0.25).epsilon(1e-15));
  const MeanProjection p3 = projection_mean(u, ev, 3);
  CounterStream s(4, 0);
  for (std::uint64_t i = 0; i < 300; ++i) {
    const double x = s.uniform(2 * i);
    const double y = s.uniform(2 * i + 1);
    CHECK(hn_eval(ev, p3, x, y) == doctest::Approx(haar_uniform_h(3, x, y)).epsilon(1e-14));
    CHECK(centered_kernel_eval(ev, u, 3, x, y) ==
          doctest::Approx((std::floor(8 * x) == std::floor(8 * y) ? 1.0 : 0.0) - 0.125).epsilon(1e-14));
  }
}

// The coefficient form of H assumes an orthonormal basis; quadrature of the
// tabulated phi sees its Gram defect, so the routes agree to a multiple of it.
TEST_CASE("closed-form pair kernel matches t-cell quadrature") {
  const auto t = table(WaveletFamily::daubechies, 2, 8);
  const KernelEvaluator ev(t);
  const double defect = basis_diagnostics(*t).orthonormality_residual;
  const DensityModel g = parse_density("gaussian(0,1)");
  const MeanProjection p = projection_mean(g, ev, 2);
  for (auto [x, y] : {std::pair{0.1, 0.3}, std::pair{-1.2, 0.4}, std::pair{2.0, 2.6}, std::pair{0.0, 3.5}}) {
    const double brute = hn_eval_brute(ev, p, x, y);
    CHECK(std::abs(hn_eval(ev, p, x, y) - brute) <= 4.0 * defect * std::abs(brute));
    CHECK(hn_eval(ev, p, x, y) == doctest::Approx(hn_eval(ev, p, y, x)).epsilon(1e-14));
  }
}

TEST_CASE("pair kernel is canonical: E H(X, y) = 0") {
  const auto t = table(WaveletFamily::daubechies, 2, 6);
  const KernelEvaluator ev(t);
  const DensityModel g = parse_density("laplace(0,1)");
  const int j = 2;
  const MeanProjection p = projection_mean(g, ev, j);
  const int bits = j + t->resolution();
  for (double y : {-0.7, 0.2, 1.9}) {
    StableSum s;
    for (std::int64_t c = -40 * (1 << bits); c < 40 * (1 << bits); ++c) {
      const double lo = std::ldexp(static_cast<double>(c), -bits);
      const double w = g.mass(lo, std::ldexp(static_cast<double>(c + 1), -bits));
      if (w > 0.0) s += w * hn_eval(ev, p, lo, y);
    }
    CHECK(std::abs(s.value()) <= 1e-14);
  }
}

TEST_CASE("ISE of a haar histogram") {
  const auto t = table(WaveletFamily::haar, 1, 4);
  const KernelEvaluator ev(t);
  const DensityModel u = parse_density("uniform(0,1)");
  const Sample s = sample(u, 50, 8);
  const int j = 2;
  const DensityEstimate e = estimate(s, ev, j);
  double counts[4] = {0, 0, 0, 0};
  for (double x : s.values) counts[static_cast<int>(std::floor(4 * x))] += 1;
  double expect = 0.0;
  for (double c : counts) expect += std::pow(c * 4.0 / 50.0 - 1.0, 2) / 4.0;
  CHECK(ise(e, u, *t) == doctest::Approx(expect).epsilon(1e-13));
  const MeanProjection p = projection_mean(u, ev, j);
  CHECK(ise_coefficient(e, p) == doctest::Approx(expect).epsilon(1e-13));
  // E I_n = sum_k Var phi_jk(X) / n = (2^j - 1) / n
  CHECK(expected_ise(p, 50) == doctest::Approx(3.0 / 50.0).epsilon(1e-14));
}

TEST_CASE("J_n equals Jbar_n") {
  const KernelEvaluator hv(table(WaveletFamily::haar, 1, 4));
  const DensityModel u = parse_density("uniform(0,1)");
  const MeanProjection pu = projection_mean(u, hv, 2);
  const KernelEvaluator dv(table(WaveletFamily::daubechies, 2, 12));
  const DensityModel g = parse_density("gaussian(0,1)");
  const MeanProjection pg = projection_mean(g, dv, 2);
  for (std::uint64_t r = 0; r < 10; ++r) {
    const IseBreakdown a = jbar_statistic(sample(u, 1024, 99, r), hv, u, 2, pu);
    CHECK(std::abs(a.j_n_stat - a.jbar) <= 1e-10);
    CHECK(a.w_n == doctest::Approx(a.u_n + a.l_n));
    const IseBreakdown b = jbar_statistic(sample(g, 1024, 99, r), dv, g, 2, pg);
    CHECK(std::abs(b.j_n_stat - b.jbar) <= 1e-4);
  }
}

TEST_CASE("fast pair statistics equal the brute pair sum") {
  const KernelEvaluator ev(table(WaveletFamily::daubechies, 3, 8));
  const DensityModel g = parse_density("gaussian(0.5,1.5)");
  const MeanProjection p = projection_mean(g, ev, 2);
  const Sample s = sample(g, 300, 1);
  const IseBreakdown fast = jbar_statistic(s, ev, g, 2, p);
  const PairStatistics slow = pair_statistics_brute(s, ev, p);
  CHECK(fast.u_n == doctest::Approx(slow.u_n).epsilon(1e-9));
  CHECK(fast.l_n == doctest::Approx(slow.l_n).epsilon(1e-9));
  CHECK(fast.w_n == doctest::Approx(slow.w_n).epsilon(1e-9));
}

TEST_CASE("martingale decomposition") {
  const auto t = table(WaveletFamily::haar, 1, 4);
  const KernelEvaluator ev(t);
  const DensityModel u = parse_density("uniform(0,1)");
  const int j = 3;
  const MeanProjection p = projection_mean(u, ev, j);
  // E H^2 = 2^{-3j} (1 - 2^{-j})
  CHECK(expected_h_squared(p, u, *t) == doctest::Approx(std::pow(2.0, -9) * 0.875).epsilon(1e-14));
  const Sample s = sample(u, 400, 2);
  const MartingaleDecomposition m = martingale_decompose(s, ev, u, j, p);
  CHECK(m.e_n_sq == doctest::Approx(0.875).epsilon(1e-14));
  CHECK(m.s_n_sq == doctest::Approx(400.0 * 399.0 / 2.0 * std::pow(2.0, -9) * 0.875).epsilon(1e-13));
  CHECK(m.s_n_sq_direct == doctest::Approx(m.s_n_sq).epsilon(1e-12));
  // increments are normalised by s_n
  StableSum sum;
  for (double x : m.x_ni) sum += x;
  CHECK(sum.value() == doctest::Approx(m.s_nn).epsilon(1e-12));
  double brute = 0.0;
  for (std::size_t i = 1; i < s.values.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) brute += haar_uniform_h(j, s.values[i], s.values[k]);
  }
  CHECK(m.u_nn == doctest::Approx(brute).epsilon(1e-11));
  CHECK(m.s_nn == doctest::Approx(m.u_nn / std::sqrt(m.s_n_sq)));
}

TEST_CASE("martingale variance routes agree for daubechies") {
  const auto t = table(WaveletFamily::daubechies, 2, 10);
  const KernelEvaluator ev(t);
  const double defect = basis_diagnostics(*t).orthonormality_residual;
  const DensityModel g = parse_density("laplace(0,1)");
  const MeanProjection p = projection_mean(g, ev, 3);
  const MartingaleDecomposition m = martingale_decompose(sample(g, 100, 3), ev, g, 3, p);
  CHECK(std::abs(m.s_n_sq_direct - m.s_n_sq) <= 4.0 * defect * m.s_n_sq);
}

TEST_CASE("windowed statistics") {
  const auto t = table(WaveletFamily::daubechies, 2, 8);
  const KernelEvaluator ev(t);
  const double defect = basis_diagnostics(*t).orthonormality_residual;
  const DensityModel g = parse_density("gaussian(0,1)");
  const MeanProjection p = projection_mean(g, ev, 2);
  const Sample s = sample(g, 200, 6);
  const RestrictedW fast = wn_restricted(s, ev, p, 1.5);
  const RestrictedW slow = wn_restricted_brute(s, ev, p, 1.5);
  CHECK(fast.u_n == doctest::Approx(slow.u_n).epsilon(1e-9));
  CHECK(fast.l_n == doctest::Approx(slow.l_n).epsilon(1e-9));
  // a window covering every support reproduces the whole-line statistic
  const RestrictedW wide = wn_restricted(s, ev, p, 40.0);
  const IseBreakdown b = jbar_statistic(s, ev, g, 2, p);
  CHECK(std::abs(wide.w_n - b.w_n) <= 4.0 * defect * std::abs(b.w_n));
  const KernelEvaluator hv(table(WaveletFamily::haar, 1, 4));
  const DensityModel u = parse_density("uniform(0,1)");
  const MeanProjection pu = projection_mean(u, hv, 3);
  const Sample su = sample(u, 200, 6);
  CHECK(wn_restricted(su, hv, pu, 2.0).w_n == doctest::Approx(jbar_statistic(su, hv, u, 3, pu).w_n).epsilon(1e-12));
}
