#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "test_util.hpp"
#include "wise/error.hpp"
#include "wise/wavelet_basis.hpp"

using namespace wise;
using wise::testing::code_of;

namespace {

}  // namespace

TEST_CASE("haar filter") {
  const WaveletFilter f = make_filter(WaveletFamily::haar, 1);
  REQUIRE(f.coefficients.size() == 2);
  CHECK(f.coefficients[0] == doctest::Approx(M_SQRT1_2).epsilon(1e-15));
  CHECK(f.coefficients[1] == doctest::Approx(M_SQRT1_2).epsilon(1e-15));
  CHECK(f.support_length() == 1);
}

TEST_CASE("daubechies-2 taps match (1+-sqrt3)/(4 sqrt2) closed form") {
  const WaveletFilter f = make_filter(WaveletFamily::daubechies, 2);
  const double expect[] = {0.48296291314453414, 0.83651630373780791, 0.22414386804201338, -0.12940952255126038};
  REQUIRE(f.coefficients.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(f.coefficients[static_cast<std::size_t>(k)] == doctest::Approx(expect[k]).epsilon(1e-13));
}

TEST_CASE("daubechies-3 taps") {
  // table values from Daubechies' Ten Lectures, normalised to sum sqrt 2
  const double expect[] = {0.33267055295008263, 0.80689150931109257, 0.45987750211849154,
                           -0.13501102001025458, -0.08544127388202666, 0.03522629188570953};
  const WaveletFilter f = make_filter(WaveletFamily::daubechies, 3);
  for (int k = 0; k < 6; ++k) CHECK(f.coefficients[static_cast<std::size_t>(k)] == doctest::Approx(expect[k]).epsilon(1e-12));
}

TEST_CASE("filter invariants for every supported order") {
  for (int n = 1; n <= kMaxOrder; ++n) {
    CAPTURE(n);
    const auto& h = make_filter(WaveletFamily::daubechies, n).coefficients;
    REQUIRE(h.size() == static_cast<std::size_t>(2 * n));
    CHECK(std::accumulate(h.begin(), h.end(), 0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    for (std::size_t m = 0; 2 * m < h.size(); ++m) {
      double s = 0.0;
      for (std::size_t k = 0; k + 2 * m < h.size(); ++k) s += h[k] * h[k + 2 * m];
      CHECK(std::abs(s - (m == 0 ? 1.0 : 0.0)) <= 1e-10);
    }
  }
}

TEST_CASE("unsupported orders") {
  CHECK(code_of([] { make_filter(WaveletFamily::daubechies, 0); }) == ErrorCode::unsupported_order);
  CHECK(code_of([] { make_filter(WaveletFamily::haar, 2); }) == ErrorCode::unsupported_order);
  CHECK(code_of([] { make_filter(WaveletFamily::daubechies, kMaxOrder + 1); }) == ErrorCode::unsupported_order);
  CHECK(code_of([] { parse_family("coiflet"); }) == ErrorCode::invalid_config);
}

TEST_CASE("haar cascade is the indicator and its wavelet") {
  for (int r : {0, 1, 5}) {
    const ScalingTable t = cascade(make_filter(WaveletFamily::haar, 1), CascadeOptions{r});
    CHECK(t.phi_at(0.0) == 1.0);
    CHECK(t.phi_at(0.999) == 1.0);
    CHECK(t.phi_at(1.0) == 0.0);
    CHECK(t.phi_at(-0.001) == 0.0);
    if (r >= 1) {
      CHECK(t.psi_at(0.25) == 1.0);
      CHECK(t.psi_at(0.75) == -1.0);
    }
  }
}

TEST_CASE("daubechies-2 integer values and diagnostics at r=12") {
  const ScalingTable t = cascade(make_filter(WaveletFamily::daubechies, 2), CascadeOptions{12});
  // phi(1) = (1+sqrt3)/2, phi(2) = (1-sqrt3)/2
  CHECK(t.phi_at(1.0) == doctest::Approx(1.3660254037844386).epsilon(1e-10));
  CHECK(t.phi_at(2.0) == doctest::Approx(-0.3660254037844386).epsilon(1e-10));
  CHECK(t.phi_at(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  const BasisReport b = basis_diagnostics(t);
  CHECK(b.partition_residual <= 1e-9);
  CHECK(b.two_scale_residual <= 1e-10);
  CHECK(b.orthonormality_residual <= 5e-3);
  CHECK(b.theta_sup >= 1.0 - 1e-9);
  CHECK(b.sup_norm == doctest::Approx(1.3660254037844386).epsilon(1e-9));
}

TEST_CASE("orthonormality residual shrinks with resolution") {
  const WaveletFilter f = make_filter(WaveletFamily::daubechies, 2);
  double prev = 1.0;
  for (int r : {4, 8, 12}) {
    const double res = basis_diagnostics(cascade(f, CascadeOptions{r})).orthonormality_residual;
    CHECK(res < prev);
    prev = res;
  }
}

TEST_CASE("haar diagnostics and majorant") {
  const ScalingTable t = cascade(make_filter(WaveletFamily::haar, 1), CascadeOptions{6});
  const BasisReport b = basis_diagnostics(t);
  CHECK(b.sup_norm == 1.0);
  CHECK(b.tv_norm == 2.0);
  CHECK(b.theta_sup == 1.0);
  CHECK(b.orthonormality_residual == 0.0);
  const MajorantSpec m = make_majorant(t);
  CHECK(m.radius == 1);
  CHECK(m.height == 1.0);
  CHECK(m.l1_norm == 2.0);
  CHECK(m.l2_sq == 2.0);
  CHECK(m(0.5) == 1.0);
  CHECK(m(-1.0) == 1.0);
  CHECK(m(1.5) == 0.0);
}

TEST_CASE("resolution cap") {
  const WaveletFilter f = make_filter(WaveletFamily::daubechies, 2);
  CHECK(code_of([&] { cascade(f, CascadeOptions{kMaxScaledBits + 1}); }) == ErrorCode::resolution_cap);
  CascadeOptions small;
  small.resolution = 12;
  small.max_entries = 100;
  CHECK(code_of([&] { cascade(f, small); }) == ErrorCode::resolution_cap);
}

TEST_CASE("table csv round trip is exact") {
  const ScalingTable t = cascade(make_filter(WaveletFamily::daubechies, 3), CascadeOptions{6});
  std::stringstream ss;
  write_table_csv(t, ss);
  const ScalingTable back = read_table_csv(ss);
  CHECK(back.resolution() == 6);
  CHECK(back.support_length() == t.support_length());
  for (std::int64_t g = 0; g <= 5 * 64; ++g) CHECK(back.phi_at_index(g) == t.phi_at_index(g));
  std::stringstream bad("not a table\n");
  CHECK(code_of([&] { read_table_csv(bad); }) == ErrorCode::io_failure);
}

TEST_CASE("translates cover the support") {
  const ScalingTable t = cascade(make_filter(WaveletFamily::daubechies, 2), CascadeOptions{8});
  for (double x : {-1.3, 0.0, 0.41, 2.99}) {
    const Translates tr = t.translates(dyadic_floor(x, 8));
    CHECK(tr.count == 3);
    double s = 0.0;
    for (int m = 0; m < tr.count; ++m) {
      s += tr.value[static_cast<std::size_t>(m)];
      CHECK(tr.value[static_cast<std::size_t>(m)] == t.phi_at(x - static_cast<double>(tr.k_first + m)));
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }
}
