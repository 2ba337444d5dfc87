#include <doctest.h>

#include <cmath>
#include <functional>
#include <memory>
#include <sstream>

#include "test_util.hpp"
#include "wise/error.hpp"
#include "wise/estimator.hpp"

using namespace wise;
using wise::testing::code_of;

namespace {

std::shared_ptr<const ScalingTable> table(WaveletFamily f, int order, int r) {
  return std::make_shared<const ScalingTable>(cascade(make_filter(f, order), CascadeOptions{r}));
}

}  // namespace

TEST_CASE("schedule blocks") {
  CHECK(BandwidthSchedule::log_lambda(0) == 0.0);
  // k / log(e + k) at k = 10
  CHECK(BandwidthSchedule::log_lambda(10) == doctest::Approx(10.0 / std::log(std::exp(1.0) + 10.0)));
  const BandwidthSchedule s = make_schedule(0.2);
  for (double n : {100.0, 1024.0, 16384.0, 1e6}) {
    const std::int64_t k = s.block(n);
    CHECK(BandwidthSchedule::lambda(k) <= n * (1 + 1e-12));
    CHECK(BandwidthSchedule::lambda(k + 1) > n);
  }
  CHECK(s.level(16384) == 3);
  CHECK(s.level(1024) == 2);
  CHECK(code_of([] { make_schedule(1.0 / 3.0); }) == ErrorCode::delta_out_of_range);
  CHECK(code_of([] { make_schedule(0.0); }) == ErrorCode::delta_out_of_range);
  CHECK(code_of([] { make_schedule(0.2, -1.0); }) == ErrorCode::invalid_config);
}

TEST_CASE("schedule property: j_n is constant on blocks and nondecreasing") {
  const BandwidthSchedule s = make_schedule(0.25, 0.5);
  int prev = s.level(2);
  std::int64_t prev_block = s.block(2);
  for (double n = 2; n < 2e6; n = std::ceil(n * 1.05)) {
    const std::int64_t k = s.block(n);
    const int j = s.level(n);
    CHECK(j >= prev);
    if (j != prev) CHECK(k != prev_block);
    CHECK(j == s.level_for_block(k));
    prev = j;
    prev_block = k;
  }
}

TEST_CASE("haar estimate is the dyadic histogram") {
  const auto t = table(WaveletFamily::haar, 1, 4);
  const KernelEvaluator ev(t);
  Sample s;
  s.values = {0.1, 0.2, 0.3, 0.6, 0.9, -0.4};
  s.n = s.values.size();
  const int j = 1;
  const DensityEstimate e = estimate(s, ev, j);
  // cells of width 1/2: [-0.5,0) has 1, [0,0.5) has 3, [0.5,1) has 2; height = count / (n h)
  CHECK(evaluate_estimate(e, *t, -0.3) == doctest::Approx(1.0 / 3.0));
  CHECK(evaluate_estimate(e, *t, 0.25) == doctest::Approx(1.0));
  CHECK(evaluate_estimate(e, *t, 0.75) == doctest::Approx(2.0 / 3.0));
  CHECK(evaluate_estimate(e, *t, 1.2) == 0.0);
  CHECK(estimate_mass(e, *t) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.coefficient(0) == doctest::Approx(std::sqrt(2.0) * 3.0 / 6.0));
  CHECK(e.form_discrepancy <= 1e-12);
}

TEST_CASE("coefficient and kernel forms agree for daubechies-2") {
  const auto t = table(WaveletFamily::daubechies, 2, 10);
  const KernelEvaluator ev(t);
  const Sample s = sample(parse_density("gaussian(0,1)"), 300, 5);
  const DensityEstimate e = estimate(s, ev, 3);
  CHECK(e.form_discrepancy <= 1e-10);
  CHECK(estimate_mass(e, *t) == doctest::Approx(1.0).epsilon(1e-9));
  std::stringstream csv;
  write_coefficients_csv(e, csv);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "k,alpha_hat");
}

TEST_CASE("accumulator grows in both directions") {
  const auto t = table(WaveletFamily::daubechies, 3, 6);
  CoefficientAccumulator acc(t, 2);
  for (double x : {0.0, 10.0, -10.0, 3.0}) acc.add(x);
  CHECK(acc.count() == 4);
  CHECK(acc.k_first() <= -44);
  CHECK(acc.k_end() >= 41);
}

TEST_CASE("gram matrices") {
  const auto h = table(WaveletFamily::haar, 1, 4);
  const BandGram g = BandGram::whole_line(*h, 3);
  CHECK(g.at(5, 5) == 1.0);
  CHECK(g.at(5, 6) == 0.0);
  const BandGram r = BandGram::restricted(*h, 2, -0.5, 0.5);
  // cells [-2/4, 2/4) give the indices -2..1 full weight
  CHECK(r.at(-2, -2) == 1.0);
  CHECK(r.at(1, 1) == 1.0);
  CHECK(r.at(2, 2) == 0.0);
  const auto d = table(WaveletFamily::daubechies, 2, 12);
  const BandGram gd = BandGram::whole_line(*d, 0);
  CHECK(gd.at(0, 0) == doctest::Approx(1.0).epsilon(2e-2));
  CHECK(std::abs(gd.at(0, 1)) <= 1e-2);
}

TEST_CASE("mean projection of the uniform under haar") {
  const auto h = table(WaveletFamily::haar, 1, 4);
  const KernelEvaluator ev(h);
  const DensityModel u = parse_density("uniform(0,1)");
  const int j = 3;
  const MeanProjection p = projection_mean(u, ev, j);
  for (std::int64_t k = 0; k < 8; ++k) CHECK(p.alpha_at(k) == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-15));
  CHECK(p.alpha_at(8) == 0.0);
  CHECK(p.alpha_at(-1) == 0.0);
  CHECK(p.bias_ise == doctest::Approx(0.0).epsilon(1e-14));
  // Var phi_jk(X) = 2^j 2^{-j} - 2^{-j}
  CHECK(p.cov_at(2, 2) == doctest::Approx(1.0 - 0.125).epsilon(1e-14));
  CHECK(p.cov_at(2, 3) == doctest::Approx(-0.125).epsilon(1e-14));
  CHECK(code_of([&] { require_projection(p, u, *h, 4); }) == ErrorCode::mean_projection_required);
}

TEST_CASE("coarse quadrature is rejected") {
  const auto h = table(WaveletFamily::haar, 1, 1);
  const KernelEvaluator ev(h);
  CHECK(code_of([&] { projection_mean(parse_density("gaussian(0,1)"), ev, 2); }) == ErrorCode::quadrature_too_coarse);
}
