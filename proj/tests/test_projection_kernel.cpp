#include <doctest.h>

#include <cmath>
#include <functional>
#include <memory>

#include "wise/error.hpp"
#include "wise/projection_kernel.hpp"
#include "wise/rng.hpp"

using namespace wise;

namespace {

std::shared_ptr<const ScalingTable> table(WaveletFamily f, int order, int r) {
  return std::make_shared<const ScalingTable>(cascade(make_filter(f, order), CascadeOptions{r}));
}

}  // namespace

TEST_CASE("haar kernel is the same-cell indicator") {
  const KernelEvaluator k(table(WaveletFamily::haar, 1, 4));
  CounterStream s(3, 0);
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const double x = 8.0 * s.uniform(2 * i) - 4.0;
    const double y = x + 2.0 * s.uniform(2 * i + 1) - 1.0;
    CHECK(k(x, y) == (std::floor(x) == std::floor(y) ? 1.0 : 0.0));
  }
  // scaled kernel K(2^j x, 2^j y)
  CHECK(k.scaled(2, 0.3, 0.49) == 1.0);
  CHECK(k.scaled(2, 0.3, 0.51) == 0.0);
}

TEST_CASE("kernel symmetry, periodicity and majorant for daubechies-3") {
  const auto t = table(WaveletFamily::daubechies, 3, 10);
  const KernelEvaluator k(t);
  const MajorantSpec maj = make_majorant(*t);
  CounterStream s(9, 1);
  for (std::uint64_t i = 0; i < 500; ++i) {
    const double x = 10.0 * s.uniform(2 * i) - 5.0;
    const double y = x + 12.0 * s.uniform(2 * i + 1) - 6.0;
    CHECK(k(x, y) == doctest::Approx(k(y, x)).epsilon(1e-12));
    CHECK(k(x + 1.0, y + 1.0) == doctest::Approx(k(x, y)).epsilon(1e-12));
    CHECK(std::abs(k(x, y)) <= maj(x - y));
  }
}

TEST_CASE("identity checks") {
  const KernelIdentityReport h = kernel_identity_checks(KernelEvaluator(table(WaveletFamily::haar, 1, 6)), {});
  CHECK(h.reproducing_residual <= 1e-12);
  CHECK(h.symmetry_residual == 0.0);
  CHECK(h.periodicity_residual == 0.0);
  CHECK(h.majorant_violations == 0);
  CHECK(h.quadruple_fast == doctest::Approx(1.0).epsilon(1e-14));
  REQUIRE(h.brute_evaluated);
  CHECK(h.quadruple_brute == doctest::Approx(1.0).epsilon(1e-12));

  KernelCheckSpec spec;
  spec.quadruple_brute_level = -1;
  const KernelIdentityReport d = kernel_identity_checks(KernelEvaluator(table(WaveletFamily::daubechies, 2, 12)), spec);
  CHECK_FALSE(d.brute_evaluated);
  CHECK(d.reproducing_residual <= 1e-4);
  CHECK(d.majorant_violations == 0);
  CHECK(std::abs(d.quadruple_fast - 1.0) <= 5e-3);
}

TEST_CASE("level limits") {
  const KernelEvaluator k(table(WaveletFamily::haar, 1, 20));
  CHECK_NOTHROW(k.check_level(20));
  bool threw = false;
  try {
    k.check_level(21);
  } catch (const Error& e) {
    threw = e.code() == ErrorCode::level_too_fine;
  }
  CHECK(threw);
}
