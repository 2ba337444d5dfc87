#include "wise/wavelet_basis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unsupported/Eigen/Polynomials>

#include "wise/error.hpp"
#include "wise/numeric.hpp"

namespace wise {
namespace {

using cplx = std::complex<double>;

std::vector<cplx> multiply_linear(const std::vector<cplx>& p, cplx root) {
  // p(z) * (z - root), coefficients ascending
  std::vector<cplx> out(p.size() + 1, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i + 1] += p[i];
    out[i] -= root * p[i];
  }
  return out;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<double> daubechies_filter(int order) {
  const int n = order;
  std::vector<cplx> poly{cplx{1.0, 0.0}};
  for (int i = 0; i < n; ++i) poly = multiply_linear(poly, cplx{-1.0, 0.0});

  if (n > 1) {
    Eigen::VectorXd p(n);
    for (int k = 0; k < n; ++k) p[k] = binomial(n - 1 + k, k);
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    solver.compute(p);
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) {
      cplx y = solver.roots()[i];
      // Newton polish on P
      for (int it = 0; it < 3; ++it) {
        cplx v{0.0, 0.0};
        cplx dv{0.0, 0.0};
        for (int k = n - 1; k >= 0; --k) {
          dv = dv * y + v;
          v = v * y + p[k];
        }
        if (std::abs(dv) == 0.0) break;
        y -= v / dv;
      }
      // (2 - z - 1/z) / 4 = y  <=>  z^2 - (2 - 4y) z + 1 = 0
      const cplx b = 2.0 - 4.0 * y;
      const cplx disc = std::sqrt(b * b - 4.0);
      cplx z = (b + disc) / 2.0;
      if (std::abs(z) < 1.0) z = (b - disc) / 2.0;
      poly = multiply_linear(poly, z);
    }
  }

  std::vector<double> h(poly.size());
  double total = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    h[i] = poly[i].real();
    total += h[i];
  }
  for (double& v : h) v *= std::sqrt(2.0) / total;
  return h;
}

double parse_value(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::io_failure, "bad number '" + std::string(text) + "' in scaling table");
  }
  return v;
}

}  // namespace

std::string_view family_name(WaveletFamily family) noexcept {
  return family == WaveletFamily::haar ? "haar" : "daubechies";
}

WaveletFamily parse_family(std::string_view name) {
  if (name == "haar") return WaveletFamily::haar;
  if (name == "daubechies" || name == "db") return WaveletFamily::daubechies;
  throw Error(ErrorCode::invalid_config, "unknown wavelet family '" + std::string(name) + "'");
}

WaveletFilter make_filter(WaveletFamily family, int order) {
  WaveletFilter f;
  f.family = family;
  f.order = order;
  if (family == WaveletFamily::haar) {
    if (order != 1) throw Error(ErrorCode::unsupported_order, "haar has order 1, got " + std::to_string(order));
    f.coefficients = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    return f;
  }
  if (order < 1 || order > kMaxOrder) {
    throw Error(ErrorCode::unsupported_order,
                "daubechies order must be in [1, " + std::to_string(kMaxOrder) + "], got " + std::to_string(order));
  }
  f.coefficients = daubechies_filter(order);
  return f;
}

ScalingTable::ScalingTable(WaveletFilter filter, int resolution, std::vector<double> phi, std::vector<double> psi)
    : filter_(std::move(filter)), resolution_(resolution), phi_(std::move(phi)), psi_(std::move(psi)) {
  const std::int64_t res = per_unit();
  const std::int64_t len = support_length();
  const auto expected = static_cast<std::size_t>(len * res + 1);
  if (phi_.size() != expected || psi_.size() != expected) {
    throw Error(ErrorCode::io_failure, "scaling table has " + std::to_string(phi_.size()) + " entries, expected " +
                                           std::to_string(expected));
  }
  double prev = 0.0;
  for (double v : phi_) {
    sup_norm_ = std::max(sup_norm_, std::abs(v));
    tv_norm_ += std::abs(v - prev);
    prev = v;
  }
  tv_norm_ += std::abs(prev);
  for (std::int64_t i = 0; i < res; ++i) {
    double s = 0.0;
    for (std::int64_t k = 0; k <= len; ++k) s += std::abs(phi_at_index(i + k * res));
    theta_sup_ = std::max(theta_sup_, s);
  }
}

double ScalingTable::phi_at(double x) const noexcept {
  const double g = std::floor(std::ldexp(x, resolution_));
  if (!(g >= 0.0) || g >= static_cast<double>(phi_.size())) return 0.0;
  return phi_[static_cast<std::size_t>(g)];
}

double ScalingTable::psi_at(double x) const noexcept {
  const double g = std::floor(std::ldexp(x, resolution_));
  if (!(g >= 0.0) || g >= static_cast<double>(psi_.size())) return 0.0;
  return psi_[static_cast<std::size_t>(g)];
}

Translates ScalingTable::translates(std::int64_t g) const noexcept {
  const std::int64_t res = per_unit();
  const int len = support_length();
  const std::int64_t q = floor_div(g, res);
  Translates t;
  t.k_first = q - len + 1;
  t.count = len;
  const std::int64_t base = g - q * res;
  for (int m = 0; m < len; ++m) {
    t.value[static_cast<std::size_t>(m)] = phi_[static_cast<std::size_t>(base + (len - 1 - m) * res)];
  }
  return t;
}

ScalingTable cascade(const WaveletFilter& filter, const CascadeOptions& options) {
  const int r = options.resolution;
  const std::int64_t len = filter.support_length();
  if (r < 0 || r > 40) throw Error(ErrorCode::resolution_cap, "resolution " + std::to_string(r) + " outside [0, 40]");
  const std::int64_t res = std::int64_t{1} << r;
  const auto size = static_cast<std::size_t>(len * res + 1);
  if (size > options.max_entries) {
    throw Error(ErrorCode::resolution_cap, "table of " + std::to_string(size) + " entries exceeds cap " +
                                               std::to_string(options.max_entries));
  }
  const auto& h = filter.coefficients;
  const double s2 = std::sqrt(2.0);
  std::vector<double> phi(size, 0.0);

  if (len == 1) {
    phi[0] = 1.0;
  } else {
    // phi(i) = sqrt2 sum_l h_{2i-l} phi(l) over interior integers 1..len-1
    const Eigen::Index m = len - 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 1, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index l = 0; l < m; ++l) {
        const Eigen::Index t = 2 * (i + 1) - (l + 1);
        if (t >= 0 && t < static_cast<Eigen::Index>(h.size())) a(i, l) = s2 * h[static_cast<std::size_t>(t)];
      }
      a(i, i) -= 1.0;
    }
    a.row(m).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
    rhs[m] = 1.0;
    const Eigen::VectorXd v = a.colPivHouseholderQr().solve(rhs);
    const double residual = (a * v - rhs).cwiseAbs().maxCoeff();
    if (!(residual < 1e-9)) {
      throw Error(ErrorCode::cascade_init, "refinement eigenproblem residual " + format_double(residual));
    }
    for (Eigen::Index i = 0; i < m; ++i) phi[static_cast<std::size_t>((i + 1) * res)] = v[i];
  }

  auto at = [&](std::int64_t i) {
    return (i >= 0 && i < static_cast<std::int64_t>(size)) ? phi[static_cast<std::size_t>(i)] : 0.0;
  };
  const std::int64_t last = len * res;
  for (int level = 1; level <= r; ++level) {
    const std::int64_t step = res >> level;
    for (std::int64_t idx = step; idx < last; idx += 2 * step) {
      double s = 0.0;
      for (std::size_t k = 0; k < h.size(); ++k) s += h[k] * at(2 * idx - static_cast<std::int64_t>(k) * res);
      phi[static_cast<std::size_t>(idx)] = s2 * s;
    }
  }

  std::vector<double> psi(size, 0.0);
  const std::size_t taps = h.size();
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(size); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < taps; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      s += sign * h[taps - 1 - k] * at(2 * i - static_cast<std::int64_t>(k) * res);
    }
    psi[static_cast<std::size_t>(i)] = s2 * s;
  }
  return ScalingTable(filter, r, std::move(phi), std::move(psi));
}

BasisReport basis_diagnostics(const ScalingTable& table) {
  BasisReport rep;
  rep.sup_norm = table.sup_norm();
  rep.tv_norm = table.tv_norm();
  rep.theta_sup = table.theta_sup();
  const auto phi = table.phi();
  const std::int64_t res = table.per_unit();
  const std::int64_t len = table.support_length();
  const auto n = static_cast<std::int64_t>(phi.size());
  const double cell = std::ldexp(1.0, -table.resolution());

  for (std::int64_t m = 0; m < len; ++m) {
    StableSum s;
    for (std::int64_t i = m * res; i < n; ++i) s += phi[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(i - m * res)];
    const double ip = s.value() * cell;
    if (m == 0) rep.l2_norm_sq = ip;
    rep.orthonormality_residual = std::max(rep.orthonormality_residual, std::abs(ip - (m == 0 ? 1.0 : 0.0)));
  }
  for (std::int64_t i = 0; i < res; ++i) {
    StableSum s;
    for (std::int64_t k = 0; k <= len; ++k) s += table.phi_at_index(i + k * res);
    rep.partition_residual = std::max(rep.partition_residual, std::abs(s.value() - 1.0));
  }
  const auto& h = table.filter().coefficients;
  for (std::int64_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) s += h[k] * table.phi_at_index(2 * i - static_cast<std::int64_t>(k) * res);
    rep.two_scale_residual = std::max(rep.two_scale_residual, std::abs(phi[static_cast<std::size_t>(i)] - std::sqrt(2.0) * s));
  }
  return rep;
}

MajorantSpec make_majorant(const ScalingTable& table) {
  MajorantSpec m;
  m.radius = table.support_length();
  m.height = table.sup_norm() * table.theta_sup();
  m.l1_norm = 2.0 * m.radius * m.height;
  m.l2_sq = 2.0 * m.radius * m.height * m.height;
  return m;
}

void write_table_csv(const ScalingTable& table, std::ostream& out) {
  out << "# wise-scaling-table v1 family=" << family_name(table.filter().family) << " order=" << table.filter().order
      << " resolution=" << table.resolution() << '\n';
  out << "grid_index,phi,psi\n";
  const auto phi = table.phi();
  const auto psi = table.psi();
  for (std::size_t i = 0; i < phi.size(); ++i) {
    out << i << ',' << format_double(phi[i]) << ',' << format_double(psi[i]) << '\n';
  }
  if (!out) throw Error(ErrorCode::io_failure, "failed writing scaling table");
}

ScalingTable read_table_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::io_failure, "empty scaling table file");
  std::istringstream hs(line);
  std::string hash, tag, version;
  hs >> hash >> tag >> version;
  if (hash != "#" || tag != "wise-scaling-table" || version != "v1") {
    throw Error(ErrorCode::io_failure, "unrecognized scaling table header '" + line + "'");
  }
  std::string family;
  int order = -1;
  int resolution = -1;
  std::string kv;
  while (hs >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    if (key == "family") family = val;
    if (key == "order") order = std::stoi(val);
    if (key == "resolution") resolution = std::stoi(val);
  }
  if (family.empty() || order < 0 || resolution < 0) {
    throw Error(ErrorCode::io_failure, "scaling table header missing family/order/resolution");
  }
  if (!std::getline(in, line) || line != "grid_index,phi,psi") {
    throw Error(ErrorCode::io_failure, "scaling table column header mismatch");
  }
  std::vector<double> phi;
  std::vector<double> psi;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw Error(ErrorCode::io_failure, "malformed scaling table row '" + line + "'");
    }
    const auto idx = std::stoull(line.substr(0, c1));
    if (idx != phi.size()) throw Error(ErrorCode::io_failure, "scaling table rows out of order");
    phi.push_back(parse_value(std::string_view(line).substr(c1 + 1, c2 - c1 - 1)));
    psi.push_back(parse_value(std::string_view(line).substr(c2 + 1)));
  }
  return ScalingTable(make_filter(parse_family(family), order), resolution, std::move(phi), std::move(psi));
}

}  // namespace wise
