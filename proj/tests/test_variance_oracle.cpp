#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "wise/numeric.hpp"
#include "wise/variance_oracle.hpp"

using namespace wise;

namespace {

std::shared_ptr<const ScalingTable> table(WaveletFamily f, int order, int r) {
  return std::make_shared<const ScalingTable>(cascade(make_filter(f, order), CascadeOptions{r}));
}

const LemmaRow& row(const LemmaReport& rep, const std::string& name) {
  auto it = std::find_if(rep.rows.begin(), rep.rows.end(), [&](const LemmaRow& r) { return r.name == name; });
  REQUIRE(it != rep.rows.end());
  return *it;
}

}  // namespace

// Haar with the uniform density on [0,1): C_n(t,s) = 1{same cell}, R_n = C_n - 2^{-j} on the unit square.
TEST_CASE("haar/uniform covariance kernels in closed form") {
  const KernelEvaluator ev(table(WaveletFamily::haar, 1, 4));
  const DensityModel u = parse_density("uniform(0,1)");
  for (int j : {1, 2, 3, 4}) {
    const double h = std::ldexp(1.0, -j);
    const CovKernels cov = cov_kernels(u, ev, j, 2.0, CovGridSpec{3, true});
    CHECK(cov.c_value(0.1 * h, 0.7 * h) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(cov.r_value(0.1 * h, 0.7 * h) == doctest::Approx(1.0 - h).epsilon(1e-13));
    CHECK(std::abs(cov.c_value(0.1 * h, 1.5 * h)) <= 1e-14);
    CHECK(cov.r_value(0.1 * h, 1.5 * h) == doctest::Approx(-h).epsilon(1e-13));
    CHECK(std::abs(cov.r_value(-0.5, 0.3)) <= 1e-14);

    MeanProjection p = projection_mean(u, ev, j);
    CHECK(e_n_squared(p, ev.table()) == doctest::Approx(1.0 - h).epsilon(1e-12));
  }
}

TEST_CASE("haar/uniform lemma integrals are exact") {
  const KernelEvaluator ev(table(WaveletFamily::haar, 1, 4));
  const DensityModel u = parse_density("uniform(0,1)");
  const CovKernels cov = cov_kernels(u, ev, 3, 2.0, CovGridSpec{3, false});
  const LemmaReport rep = lemma_integrals(cov, u);
  CHECK(rep.all_pass);
  CHECK(rep.c_sq_box == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.target_box == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.r_sq_line == doctest::Approx(0.875).epsilon(1e-12));
  CHECK(rep.operator_norm == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(row(rep, "limit_deviation_box").exact);
  CHECK(row(rep, "line_deviation_c").exact);
  CHECK(row(rep, "kbar_sq_integral_sup").value <= row(rep, "kbar_sq_integral_sup").bound);
  for (const LemmaRow& r : rep.rows) {
    if (!std::isnan(r.bound)) CHECK_MESSAGE(r.pass, r.name);
  }
}

TEST_CASE("haar/uniform operator spectrum") {
  const KernelEvaluator ev(table(WaveletFamily::haar, 1, 4));
  const DensityModel u = parse_density("uniform(0,1)");
  for (int j : {2, 3}) {
    const double h = std::ldexp(1.0, -j);
    const int cells = 1 << j;
    const CovKernels cov = cov_kernels(u, ev, j, 2.0, CovGridSpec{3, true});
    std::vector<double> ops = operator_eigenvalues(cov);
    std::sort(ops.rbegin(), ops.rend());
    for (int k = 0; k < cells - 1; ++k) CHECK(ops[k] == doctest::Approx(h).epsilon(1e-10));
    for (std::size_t k = cells - 1; k < ops.size(); ++k) CHECK(std::abs(ops[k]) <= 1e-10);

    const SpectrumReport sp = spectrum(cov);
    CHECK(sp.psd_ok);
    CHECK(sp.hs_relative_gap <= 1e-6);
    CHECK(std::is_sorted(sp.eigenvalues.rbegin(), sp.eigenvalues.rend()));
    for (int k = 0; k < cells - 1; ++k) CHECK(sp.eigenvalues[k] == doctest::Approx(h).epsilon(1e-9));
    // sigma^2(M) = 2 2^j (2^j - 1) 2^{-2j}
    CHECK(sp.sigma_sq_M == doctest::Approx(2.0 * (1.0 - h)).epsilon(1e-9));
  }
}

TEST_CASE("daubechies spectrum: Hilbert-Schmidt identity and positivity") {
  const KernelEvaluator ev(table(WaveletFamily::daubechies, 2, 10));
  const DensityModel g = parse_density("gaussian(0,1)");
  const CovKernels cov = cov_kernels(g, ev, 2, 2.0, CovGridSpec{3, true});
  const SpectrumReport sp = spectrum(cov);
  CHECK(sp.hs_relative_gap <= 1e-6);
  CHECK(sp.psd_ok);
  CHECK(sp.sum_lambda_sq > 0.0);
  CHECK(sp.eigenvalues.front() > 0.0);

  // Nystrom and coefficient-space eigenvalues agree at the top of the spectrum
  std::vector<double> ops = operator_eigenvalues(cov);
  std::sort(ops.rbegin(), ops.rend());
  CHECK(sp.eigenvalues.front() == doctest::Approx(ops.front()).epsilon(2e-2));
}

TEST_CASE("chaos draws are standardised and reproducible") {
  const KernelEvaluator ev(table(WaveletFamily::daubechies, 2, 10));
  const DensityModel g = parse_density("gaussian(0,1)");
  const SpectrumReport sp = spectrum(cov_kernels(g, ev, 2, 2.0, CovGridSpec{3, true}));
  const std::vector<double> a = chaos_sample(sp, 7, 20000);
  const std::vector<double> b = chaos_sample(sp, 7, 20000);
  CHECK(a == b);
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
  double var = 0.0;
  for (double x : a) var += (x - mean) * (x - mean);
  var /= a.size() - 1;
  CHECK(std::abs(mean) <= 0.03);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
  // prefix property: draw i depends only on (seed, i)
  const std::vector<double> c = chaos_sample(sp, 7, 100);
  CHECK(std::equal(c.begin(), c.end(), a.begin()));
}

TEST_CASE("ijn sum reproduces int f^2 for the uniform density") {
  const DensityModel u = parse_density("uniform(0,1)");
  for (int j : {2, 4, 6}) {
    const IjnReport r = ijn_sum(u, 1, j, 2.0, 0.25, 0.5, 0.5, -0.5);
    CHECK(r.total == doctest::Approx(r.i1 + r.i2 + r.i3).epsilon(1e-14));
    CHECK(r.target == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.total == doctest::Approx(1.0).epsilon(std::ldexp(4.0, -j)));
    CHECK(r.i2 <= 4.0 * 1 * std::ldexp(1.0, -j) + 1e-14);
  }
}

TEST_CASE("rate checks on synthetic reports") {
  std::vector<LemmaReport> reps;
  for (int j = 2; j <= 6; ++j) {
    LemmaReport r;
    r.level = j;
    r.limit_deviation = 0.5 * std::ldexp(1.0, -j);
    r.target_box = 1.0;
    r.c_sq_box = 1.0 - r.limit_deviation;
    r.line_deviation_c = 0.3 * std::ldexp(1.0, -j);
    r.line_deviation_r = 2.0 * (std::pow(2.0, -0.5 * j) + std::ldexp(1.0, -j));
    reps.push_back(r);
  }
  const LemmaRateReport ok = lemma_rate_checks(reps, 1.0);
  CHECK(ok.deviation_monotone);
  CHECK(ok.c_rate_holds);
  CHECK(ok.r_rate_holds);
  CHECK(ok.deviation_slope == doctest::Approx(-1.0).epsilon(1e-9));

  reps[3].limit_deviation = 0.5;
  reps[3].line_deviation_c = 0.3;
  const LemmaRateReport bad = lemma_rate_checks(reps, 1.0);
  CHECK_FALSE(bad.deviation_monotone);
  CHECK_FALSE(bad.c_rate_holds);
}

TEST_CASE("spectrum csv format") {
  SpectrumReport sp;
  sp.eigenvalues = {0.5, 0.25};
  std::ostringstream out;
  write_spectrum_csv(sp, out);
  const std::string s = out.str();
  CHECK(s.rfind("k,lambda\n", 0) == 0);
  CHECK(s.find("\n1,0.5") != std::string::npos);
  CHECK(s.find("\n2,0.25") != std::string::npos);
}
