#include "wise/density.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "wise/error.hpp"
#include "wise/numeric.hpp"
#include "wise/rng.hpp"

namespace wise {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kSqrtPi = 1.7724538509055160273;

double normal_lower(double x, double mu, double s) { return 0.5 * std::erfc(-(x - mu) / (s * kSqrt2)); }
double normal_upper(double x, double mu, double s) { return 0.5 * std::erfc((x - mu) / (s * kSqrt2)); }

double laplace_lower(double x, double mu, double s) {
  return x < mu ? 0.5 * std::exp((x - mu) / s) : 1.0 - 0.5 * std::exp(-(x - mu) / s);
}
double laplace_upper(double x, double mu, double s) {
  return x >= mu ? 0.5 * std::exp(-(x - mu) / s) : 1.0 - 0.5 * std::exp((x - mu) / s);
}

// P(lo <= X < hi) for a law symmetric about mu, subtracting in whichever tail
// keeps both terms small.
template <class Lower, class Upper>
double tail_safe_mass(double lo, double hi, double mu, Lower lower, Upper upper) {
  if (!(hi > lo)) return 0.0;
  if (lo >= mu) return upper(lo) - upper(hi);
  if (hi <= mu) return lower(hi) - lower(lo);
  return 1.0 - lower(lo) - upper(hi);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::invalid_density_params, what);
}

std::string format_name(DensityFamily family, const std::vector<double>& params) {
  std::string s(density_family_name(family));
  s += '(';
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) s += ',';
    s += format_double(params[i]);
  }
  s += ')';
  return s;
}

}  // namespace

std::string_view density_family_name(DensityFamily family) noexcept {
  switch (family) {
    case DensityFamily::uniform: return "uniform";
    case DensityFamily::gaussian: return "gaussian";
    case DensityFamily::laplace: return "laplace";
    case DensityFamily::triangular: return "triangular";
  }
  return "unknown";
}

DensityModel::DensityModel(DensityFamily family, std::vector<double> params)
    : family_(family), params_(std::move(params)) {
  for (double p : params_) require(std::isfinite(p), "density parameters must be finite");
  const auto& p = params_;
  switch (family_) {
    case DensityFamily::uniform: {
      require(p.size() == 2, "uniform takes (a, b)");
      require(p[1] > p[0], "uniform requires b > a");
      const double w = p[1] - p[0];
      l2_sq_ = 1.0 / w;
      sup_norm_ = 1.0 / w;
      tail_point_ = std::max({0.0, p[0], -p[1]});
      window_ = {p[0], p[1]};
      break;
    }
    case DensityFamily::gaussian: {
      require(p.size() == 2, "gaussian takes (mu, sigma)");
      require(p[1] > 0.0, "gaussian requires sigma > 0");
      l2_sq_ = 1.0 / (2.0 * p[1] * kSqrtPi);
      sup_norm_ = 1.0 / (p[1] * kSqrt2 * kSqrtPi);
      tail_point_ = std::abs(p[0]);
      const double z = -normal_quantile(kTailEpsilon);
      window_ = {p[0] - z * p[1], p[0] + z * p[1]};
      break;
    }
    case DensityFamily::laplace: {
      require(p.size() == 2, "laplace takes (mu, b)");
      require(p[1] > 0.0, "laplace requires b > 0");
      l2_sq_ = 1.0 / (4.0 * p[1]);
      sup_norm_ = 1.0 / (2.0 * p[1]);
      tail_point_ = std::abs(p[0]);
      const double t = p[1] * std::log(0.5 / kTailEpsilon);
      window_ = {p[0] - t, p[0] + t};
      break;
    }
    case DensityFamily::triangular: {
      require(p.size() == 3, "triangular takes (a, c, b)");
      require(p[2] > p[0], "triangular requires b > a");
      require(p[1] >= p[0] && p[1] <= p[2], "triangular requires a <= c <= b");
      const double w = p[2] - p[0];
      l2_sq_ = 4.0 / (3.0 * w);
      sup_norm_ = 2.0 / w;
      tail_point_ = std::abs(p[1]);
      window_ = {p[0], p[2]};
      break;
    }
  }
  holder_alpha_ = 1.0;
  name_ = format_name(family_, params_);
}

double DensityModel::pdf(double x) const noexcept {
  const auto& p = params_;
  switch (family_) {
    case DensityFamily::uniform: return (x >= p[0] && x < p[1]) ? 1.0 / (p[1] - p[0]) : 0.0;
    case DensityFamily::gaussian: {
      const double z = (x - p[0]) / p[1];
      return std::exp(-0.5 * z * z) / (p[1] * kSqrt2 * kSqrtPi);
    }
    case DensityFamily::laplace: return std::exp(-std::abs(x - p[0]) / p[1]) / (2.0 * p[1]);
    case DensityFamily::triangular: {
      const double a = p[0], c = p[1], b = p[2];
      if (x < a || x >= b) return 0.0;
      if (x < c) return 2.0 * (x - a) / ((b - a) * (c - a));
      return 2.0 * (b - x) / ((b - a) * (b - c));
    }
  }
  return 0.0;
}

double DensityModel::cdf(double x) const noexcept {
  const auto& p = params_;
  switch (family_) {
    case DensityFamily::uniform: return clamp01((x - p[0]) / (p[1] - p[0]));
    case DensityFamily::gaussian: return normal_lower(x, p[0], p[1]);
    case DensityFamily::laplace: return laplace_lower(x, p[0], p[1]);
    case DensityFamily::triangular: {
      const double a = p[0], c = p[1], b = p[2];
      if (x <= a) return 0.0;
      if (x >= b) return 1.0;
      if (x < c) return (x - a) * (x - a) / ((b - a) * (c - a));
      return 1.0 - (b - x) * (b - x) / ((b - a) * (b - c));
    }
  }
  return 0.0;
}

double DensityModel::survival(double x) const noexcept {
  const auto& p = params_;
  switch (family_) {
    case DensityFamily::gaussian: return normal_upper(x, p[0], p[1]);
    case DensityFamily::laplace: return laplace_upper(x, p[0], p[1]);
    case DensityFamily::triangular: {
      const double a = p[0], c = p[1], b = p[2];
      if (x >= b) return 0.0;
      if (x >= c) return (b - x) * (b - x) / ((b - a) * (b - c));
      return 1.0 - cdf(x);
    }
    default: return 1.0 - cdf(x);
  }
}

double DensityModel::quantile(double u) const noexcept {
  const auto& p = params_;
  switch (family_) {
    case DensityFamily::uniform: return p[0] + u * (p[1] - p[0]);
    case DensityFamily::gaussian: return p[0] + p[1] * normal_quantile(u);
    case DensityFamily::laplace:
      return u < 0.5 ? p[0] + p[1] * std::log(2.0 * u) : p[0] - p[1] * std::log(2.0 * (1.0 - u));
    case DensityFamily::triangular: {
      const double a = p[0], c = p[1], b = p[2];
      const double fc = (c - a) / (b - a);
      if (u < fc) return a + std::sqrt(u * (b - a) * (c - a));
      return b - std::sqrt((1.0 - u) * (b - a) * (b - c));
    }
  }
  return 0.0;
}

double DensityModel::mass(double lo, double hi) const noexcept {
  const auto& p = params_;
  switch (family_) {
    case DensityFamily::gaussian:
      return tail_safe_mass(
          lo, hi, p[0], [&](double x) { return normal_lower(x, p[0], p[1]); },
          [&](double x) { return normal_upper(x, p[0], p[1]); });
    case DensityFamily::laplace:
      return tail_safe_mass(
          lo, hi, p[0], [&](double x) { return laplace_lower(x, p[0], p[1]); },
          [&](double x) { return laplace_upper(x, p[0], p[1]); });
    case DensityFamily::triangular:
      return tail_safe_mass(
          lo, hi, p[1], [&](double x) { return cdf(x); }, [&](double x) { return survival(x); });
    default: return hi > lo ? cdf(hi) - cdf(lo) : 0.0;
  }
}

double DensityModel::sq_cdf(double x) const noexcept {
  const auto& p = params_;
  switch (family_) {
    case DensityFamily::uniform: {
      const double w = p[1] - p[0];
      return std::clamp(x - p[0], 0.0, w) / (w * w);
    }
    case DensityFamily::gaussian: return l2_sq_ * normal_lower(x, p[0], p[1] / kSqrt2);
    case DensityFamily::laplace: return l2_sq_ * laplace_lower(x, p[0], p[1] / 2.0);
    case DensityFamily::triangular: {
      const double a = p[0], c = p[1], b = p[2];
      const double w2 = (b - a) * (b - a);
      if (x <= a) return 0.0;
      if (x < c) {
        const double d = x - a;
        return 4.0 * d * d * d / (3.0 * w2 * (c - a) * (c - a));
      }
      const double left = 4.0 * (c - a) / (3.0 * w2);
      const double xc = std::min(x, b);
      const double e = b - xc;
      const double bc = b - c;
      return left + 4.0 * (bc * bc * bc - e * e * e) / (3.0 * w2 * bc * bc);
    }
  }
  return 0.0;
}

double DensityModel::sq_mass(double lo, double hi) const noexcept {
  if (!(hi > lo)) return 0.0;
  const auto& p = params_;
  switch (family_) {
    case DensityFamily::gaussian: {
      const double s = p[1] / kSqrt2;
      return l2_sq_ * tail_safe_mass(
                          lo, hi, p[0], [&](double x) { return normal_lower(x, p[0], s); },
                          [&](double x) { return normal_upper(x, p[0], s); });
    }
    case DensityFamily::laplace: {
      const double s = p[1] / 2.0;
      return l2_sq_ * tail_safe_mass(
                          lo, hi, p[0], [&](double x) { return laplace_lower(x, p[0], s); },
                          [&](double x) { return laplace_upper(x, p[0], s); });
    }
    default: return sq_cdf(hi) - sq_cdf(lo);
  }
}

DensityModel make_density(std::string_view name, std::span<const double> params) {
  std::vector<double> p(params.begin(), params.end());
  if (name == "uniform") return DensityModel(DensityFamily::uniform, std::move(p));
  if (name == "gaussian" || name == "normal") return DensityModel(DensityFamily::gaussian, std::move(p));
  if (name == "laplace") return DensityModel(DensityFamily::laplace, std::move(p));
  if (name == "triangular") return DensityModel(DensityFamily::triangular, std::move(p));
  throw Error(ErrorCode::invalid_density_params, "unknown density '" + std::string(name) + "'");
}

DensityModel parse_density(std::string_view spec) {
  const auto open = spec.find('(');
  if (open == std::string_view::npos || spec.back() != ')') {
    throw Error(ErrorCode::invalid_density_params, "expected name(p1,...) but got '" + std::string(spec) + "'");
  }
  const std::string_view name = spec.substr(0, open);
  std::string_view rest = spec.substr(open + 1, spec.size() - open - 2);
  std::vector<double> params;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::string_view tok = rest.substr(0, comma);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
      throw Error(ErrorCode::invalid_density_params, "bad parameter '" + std::string(tok) + "'");
    }
    params.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return make_density(name, params);
}

Sample sample(const DensityModel& density, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  if (n == 0) throw Error(ErrorCode::empty_sample, "sample size must be at least 1");
  Sample s;
  s.values.resize(n);
  CounterStream(seed, stream).uniforms(0, s.values);
  for (double& v : s.values) v = density.quantile(v);
  s.seed = seed;
  s.stream = stream;
  s.density_name = density.name();
  s.n = n;
  return s;
}

FunctionalReport density_integrals(const DensityModel& density, Interval window, double box_radius) {
  const double left = density.cdf(window.lo);
  const double right = density.survival(window.hi);
  const double allowed = kTailEpsilon * (1.0 + 1e-9);
  if (left > allowed || right > allowed) {
    throw Error(ErrorCode::window_too_small, "window [" + format_double(window.lo) + ", " + format_double(window.hi) +
                                                 "] leaves tail mass " + format_double(std::max(left, right)));
  }
  FunctionalReport r;
  r.l2_sq = density.l2_sq();
  r.sigma_sq = 2.0 * r.l2_sq;
  r.l2_fourth = r.l2_sq * r.l2_sq;
  r.box_radius = box_radius;
  r.mass_in_box = density.mass(-box_radius, box_radius);
  r.l2_sq_in_box = density.sq_mass(-box_radius, box_radius);
  r.mass_outside_box = density.cdf(-box_radius) + density.survival(box_radius);
  r.l2_sq_outside_box = density.sq_cdf(-box_radius) + (r.l2_sq - density.sq_cdf(box_radius));
  return r;
}

}  // namespace wise
