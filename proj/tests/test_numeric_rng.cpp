#include <doctest.h>

#include <cmath>
#include <vector>

#include "wise/numeric.hpp"
#include "wise/rng.hpp"

using namespace wise;

TEST_CASE("philox known-answer vectors") {
  // Random123 kat_vectors for philox4x64-10
  auto a = philox4x64({0, 0, 0, 0}, {0, 0});
  CHECK(a[0] == 0x16554d9eca36314cULL);
  CHECK(a[1] == 0xdb20fe9d672d0fdcULL);
  auto b = philox4x64({~0ULL, ~0ULL, ~0ULL, ~0ULL}, {~0ULL, ~0ULL});
  CHECK(b[0] == 0x87b092c3013fe90bULL);
  auto c = philox4x64({0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL, 0x082efa98ec4e6c89ULL},
                      {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL});
  CHECK(c[0] == 0xa528f45403e61d95ULL);
}

TEST_CASE("counter streams are random access and independent") {
  CounterStream s(7, 3);
  std::vector<double> block(10);
  s.uniforms(5, block);
  for (std::size_t i = 0; i < block.size(); ++i) CHECK(block[i] == s.uniform(5 + i));
  CHECK(CounterStream(7, 3).uniform(0) == s.uniform(0));
  CHECK(CounterStream(7, 4).uniform(0) != s.uniform(0));
  CHECK(CounterStream(8, 3).uniform(0) != s.uniform(0));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = s.uniform(i);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("stream normals look standard") {
  CounterStream s(1, 0);
  std::vector<double> z(20000);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = s.normal(i);
  const MeanStat m = mean_stat(z);
  CHECK(std::abs(m.mean) < 0.03);
  CHECK(std::abs(m.variance - 1.0) < 0.04);
  CHECK(ks_distance_normal(z) < 0.015);
}

TEST_CASE("normal cdf and quantile") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
  for (double p : {1e-12, 0.01, 0.3, 0.5, 0.9, 1 - 1e-9}) CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("ks distances") {
  // empirical cdf of {0.5} against U(0,1): sup is 0.5
  const std::vector<double> one{0.5};
  CHECK(ks_distance(one, [](double x) { return std::clamp(x, 0.0, 1.0); }) == doctest::Approx(0.5));
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{3, 4, 5, 6};
  CHECK(ks_distance_two_sample(a, b) == doctest::Approx(0.5));
  CHECK(ks_distance_two_sample(a, a) == 0.0);
}

TEST_CASE("line fit and stable sums") {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{1, 3, 5, 7};
  const LinearFit f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_se == doctest::Approx(0.0).epsilon(1e-12));
  StableSum s;
  s += 1e16;
  s += 1.0;
  s += -1e16;
  CHECK(s.value() == 1.0);
  CHECK(floor_div(-7, 2) == -4);
  CHECK(floor_div(7, 2) == 3);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(1.0) == "1");
}
