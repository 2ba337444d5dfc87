#include "wise/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "wise/error.hpp"
#include "wise/numeric.hpp"

namespace wise {

BandwidthSchedule::BandwidthSchedule(double delta, double multiplier) : delta_(delta), multiplier_(multiplier) {}

double BandwidthSchedule::log_lambda(std::int64_t k) noexcept {
  const double kk = static_cast<double>(k);
  return kk / std::log(std::numbers::e + kk);
}

double BandwidthSchedule::lambda(std::int64_t k) noexcept { return std::exp(log_lambda(k)); }

std::int64_t BandwidthSchedule::block(double n) const noexcept {
  if (!(n >= 1.0)) return 0;
  const double target = std::log(n);
  std::int64_t hi = 1;
  while (log_lambda(hi) <= target) hi *= 2;
  std::int64_t lo = 0;  // log_lambda(lo) <= target < log_lambda(hi)
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (log_lambda(mid) <= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

int BandwidthSchedule::level_for_block(std::int64_t k) const noexcept {
  const double j = delta_ * log_lambda(k) / std::numbers::ln2 - std::log2(multiplier_);
  return std::max(0, static_cast<int>(std::lround(j)));
}

BandwidthSchedule make_schedule(double delta, double multiplier) {
  if (!(delta > 0.0 && delta < 1.0 / 3.0)) {
    throw Error(ErrorCode::delta_out_of_range, "delta must lie in (0, 1/3), got " + format_double(delta));
  }
  if (!(multiplier > 0.0) || !std::isfinite(multiplier)) {
    throw Error(ErrorCode::invalid_config, "schedule multiplier must be positive, got " + format_double(multiplier));
  }
  return BandwidthSchedule(delta, multiplier);
}

CoefficientAccumulator::CoefficientAccumulator(std::shared_ptr<const ScalingTable> table, int level)
    : table_(std::move(table)), level_(level) {
  KernelEvaluator(table_).check_level(level);
}

void CoefficientAccumulator::add(double x) {
  const Translates t = table_->translates(dyadic_floor(x, level_ + table_->resolution()));
  const std::int64_t lo = t.k_first;
  const std::int64_t hi = t.k_first + t.count;
  if (sums_.empty()) {
    k_first_ = lo;
    sums_.assign(static_cast<std::size_t>(t.count), 0.0);
  } else if (lo < k_first_) {
    const auto grow = static_cast<std::size_t>(std::max<std::int64_t>(k_first_ - lo, static_cast<std::int64_t>(sums_.size() / 2)));
    sums_.insert(sums_.begin(), grow, 0.0);
    k_first_ -= static_cast<std::int64_t>(grow);
  } else if (hi > k_end()) {
    const auto grow = static_cast<std::size_t>(std::max<std::int64_t>(hi - k_end(), static_cast<std::int64_t>(sums_.size() / 2)));
    sums_.resize(sums_.size() + grow, 0.0);
  }
  double* base = sums_.data() + (lo - k_first_);
  for (int m = 0; m < t.count; ++m) {
    const double v = t.value[static_cast<std::size_t>(m)];
    base[m] += v;
    phi_sq_total_ += v * v;
  }
  ++count_;
}

void CoefficientAccumulator::add(std::span<const double> xs) {
  for (double x : xs) add(x);
}

double CoefficientAccumulator::alpha_hat(std::int64_t k) const noexcept {
  if (count_ == 0) return 0.0;
  return std::sqrt(std::ldexp(1.0, level_)) * sum(k) / static_cast<double>(count_);
}

double DensityEstimate::coefficient(std::int64_t k) const noexcept {
  const std::int64_t i = k - k_first;
  return (i >= 0 && i < static_cast<std::int64_t>(alpha_hat.size())) ? alpha_hat[static_cast<std::size_t>(i)] : 0.0;
}

double DensityEstimate::grid_x(std::size_t m) const noexcept {
  return std::ldexp(static_cast<double>(grid_first + static_cast<std::int64_t>(m)), -(level + grid_shift));
}

double evaluate_estimate(const DensityEstimate& est, const ScalingTable& table, double x) {
  const Translates t = table.translates(dyadic_floor(x, est.level + table.resolution()));
  const double scale = std::sqrt(std::ldexp(1.0, est.level));
  double s = 0.0;
  for (int m = 0; m < t.count; ++m) s += est.coefficient(t.k_first + m) * t.value[static_cast<std::size_t>(m)];
  return scale * s;
}

double estimate_mass(const DensityEstimate& est, const ScalingTable& table) {
  StableSum phi_sum;
  for (double v : table.phi()) phi_sum += v;
  const double phi_integral = std::ldexp(phi_sum.value(), -table.resolution());
  StableSum a;
  for (double v : est.alpha_hat) a += v;
  return a.value() * phi_integral / std::sqrt(std::ldexp(1.0, est.level));
}

DensityEstimate estimate(const Sample& sample, const KernelEvaluator& evaluator, int level,
                         const EstimateOptions& options) {
  if (sample.values.empty()) throw Error(ErrorCode::empty_sample, "cannot estimate from an empty sample");
  evaluator.check_level(level);
  CoefficientAccumulator acc(evaluator.table_ptr(), level);
  acc.add(sample.values);

  DensityEstimate est;
  est.level = level;
  est.n = sample.values.size();
  est.k_first = acc.k_first();
  const double scale = std::sqrt(std::ldexp(1.0, level)) / static_cast<double>(est.n);
  est.alpha_hat.reserve(acc.sums().size());
  for (double s : acc.sums()) est.alpha_hat.push_back(scale * s);
  // trim zero padding at both ends
  while (!est.alpha_hat.empty() && est.alpha_hat.back() == 0.0) est.alpha_hat.pop_back();
  std::size_t lead = 0;
  while (lead < est.alpha_hat.size() && est.alpha_hat[lead] == 0.0) ++lead;
  est.alpha_hat.erase(est.alpha_hat.begin(), est.alpha_hat.begin() + static_cast<std::ptrdiff_t>(lead));
  est.k_first += static_cast<std::int64_t>(lead);

  if (!options.with_grid) return est;
  const ScalingTable& table = evaluator.table();
  est.grid_shift = std::max(options.grid_shift, 0);
  const std::int64_t per = std::int64_t{1} << est.grid_shift;
  const std::int64_t last_k = est.k_first + static_cast<std::int64_t>(est.alpha_hat.size()) - 1;
  est.grid_first = est.k_first * per;
  const std::int64_t grid_end = (last_k + table.support_length()) * per;
  const auto nodes = static_cast<std::size_t>(std::max<std::int64_t>(grid_end - est.grid_first, 0));
  est.grid_values.resize(nodes);
  for (std::size_t m = 0; m < nodes; ++m) est.grid_values[m] = evaluate_estimate(est, table, est.grid_x(m));

  if (options.kernel_form) {
    const int bits = level + table.resolution();
    std::vector<std::int64_t> gi(sample.values.size());
    for (std::size_t i = 0; i < gi.size(); ++i) gi[i] = dyadic_floor(sample.values[i], bits);
    const double w = std::ldexp(1.0, level) / static_cast<double>(est.n);
    est.kernel_values.resize(nodes);
    for (std::size_t m = 0; m < nodes; ++m) {
      const std::int64_t gx = dyadic_floor(est.grid_x(m), bits);
      double s = 0.0;
      for (std::int64_t g : gi) s += evaluator.at_grid(gx, g);
      est.kernel_values[m] = w * s;
      est.form_discrepancy = std::max(est.form_discrepancy, std::abs(est.kernel_values[m] - est.grid_values[m]));
    }
  }
  return est;
}

void write_estimate_csv(const DensityEstimate& est, std::ostream& out) {
  out << "x,f_hat\n";
  for (std::size_t m = 0; m < est.grid_values.size(); ++m) {
    out << format_double(est.grid_x(m)) << ',' << format_double(est.grid_values[m]) << '\n';
  }
}

void write_coefficients_csv(const DensityEstimate& est, std::ostream& out) {
  out << "k,alpha_hat\n";
  for (std::size_t i = 0; i < est.alpha_hat.size(); ++i) {
    out << est.k_first + static_cast<std::int64_t>(i) << ',' << format_double(est.alpha_hat[i]) << '\n';
  }
}

double MeanProjection::moment_at(std::int64_t k, std::int64_t l) const noexcept {
  if (l < k) std::swap(k, l);
  const std::int64_t d = l - k;
  if (d >= support || k < k_first || k >= k_end()) return 0.0;
  return moments[static_cast<std::size_t>((k - k_first) * support + d)];
}

double MeanProjection::mean_at(const ScalingTable& table, double x) const {
  const Translates t = table.translates(dyadic_floor(x, level + table.resolution()));
  double s = 0.0;
  for (int m = 0; m < t.count; ++m) s += alpha_at(t.k_first + m) * t.value[static_cast<std::size_t>(m)];
  return std::sqrt(std::ldexp(1.0, level)) * s;
}

MeanProjection projection_mean(const DensityModel& density, const KernelEvaluator& evaluator, int level) {
  evaluator.check_level(level);
  const ScalingTable& table = evaluator.table();
  const int r = table.resolution();
  if (r < 2) {
    throw Error(ErrorCode::quadrature_too_coarse,
                "table resolution " + std::to_string(r) + " gives cells coarser than 2^{-(j+2)}");
  }
  const int len = table.support_length();
  const std::int64_t res = table.per_unit();
  const std::int64_t ring = len * res;
  const int bits = level + r;
  const auto phi = table.phi();
  const double s1 = std::sqrt(std::ldexp(1.0, level));
  const double s2 = std::ldexp(1.0, level);
  const double h = std::ldexp(1.0, -bits);

  MeanProjection mp;
  mp.level = level;
  mp.resolution = r;
  mp.support = len;
  mp.density_name = density.name();
  mp.l2_sq = density.l2_sq();
  const Interval win = density.support_window();
  mp.k_first = dyadic_floor(win.lo, level) - len + 1;
  const std::int64_t k_last = dyadic_floor(win.hi, level);
  const auto count = static_cast<std::size_t>(k_last - mp.k_first + 1);
  mp.alpha.assign(count, 0.0);
  mp.moments.assign(count * static_cast<std::size_t>(len), 0.0);
  mp.variance.assign(count, 0.0);

  mp.gram.assign(static_cast<std::size_t>(len), 0.0);
  for (int d = 0; d < len; ++d) {
    StableSum s;
    for (std::int64_t i = d * res; i < ring; ++i) s += phi[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(i - d * res)];
    mp.gram[static_cast<std::size_t>(d)] = s.value() / static_cast<double>(res);
  }

  std::vector<double> mass(static_cast<std::size_t>(ring));
  auto slot = [&](std::int64_t g) -> double& { return mass[static_cast<std::size_t>(g - floor_div(g, ring) * ring)]; };
  auto fill = [&](std::int64_t g0, std::int64_t g1) {
    for (std::int64_t g = g0; g < g1; ++g) {
      slot(g) = density.mass(std::ldexp(static_cast<double>(g), -bits), std::ldexp(static_cast<double>(g + 1), -bits));
    }
  };
  StableSum bias;
  // c(g) = (Pi_j f) on cell g, which needs alpha_k for k <= floor(g / res)
  auto bias_cells = [&](std::int64_t g0, std::int64_t g1) {
    for (std::int64_t g = g0; g < g1; ++g) {
      const std::int64_t q = floor_div(g, res);
      double c = 0.0;
      for (std::int64_t k = std::max(q - len + 1, mp.k_first); k <= std::min(q, k_last); ++k) {
        c += mp.alpha[static_cast<std::size_t>(k - mp.k_first)] * phi[static_cast<std::size_t>(g - k * res)];
      }
      c *= s1;
      bias += c * c * h - 2.0 * c * slot(g);
    }
  };

  fill(mp.k_first * res, mp.k_first * res + ring);
  StableSum asq;
  StableSum vsum;
  for (std::int64_t k = mp.k_first; k <= k_last; ++k) {
    if (k > mp.k_first) fill((k + len - 1) * res, (k + len) * res);
    const std::int64_t g0 = k * res;
    const auto idx = static_cast<std::size_t>(k - mp.k_first);
    double a = 0.0;
    for (std::int64_t i = 0; i < ring; ++i) a += phi[static_cast<std::size_t>(i)] * slot(g0 + i);
    a *= s1;
    mp.alpha[idx] = a;
    for (int d = 0; d < len; ++d) {
      double m = 0.0;
      for (std::int64_t i = d * res; i < ring; ++i) {
        m += phi[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(i - d * res)] * slot(g0 + i);
      }
      mp.moments[idx * static_cast<std::size_t>(len) + static_cast<std::size_t>(d)] = s2 * m;
    }
    mp.variance[idx] = mp.moments[idx * static_cast<std::size_t>(len)] - a * a;
    asq += a * a;
    vsum += mp.variance[idx];
    bias_cells(g0, g0 + res);
  }
  bias_cells((k_last + 1) * res, (k_last + len) * res);
  mp.alpha_sq_sum = asq.value();
  mp.variance_sum = vsum.value();
  mp.bias_ise = std::max(0.0, bias.value() + mp.l2_sq);

  StableSum tr;
  for (std::size_t i = 0; i < count; ++i) {
    for (int d = 0; d < len; ++d) {
      const auto k = mp.k_first + static_cast<std::int64_t>(i);
      const double c = mp.moments[i * static_cast<std::size_t>(len) + static_cast<std::size_t>(d)] -
                       mp.alpha[i] * mp.alpha_at(k + d);
      tr += (d == 0 ? 1.0 : 2.0) * mp.gram[static_cast<std::size_t>(d)] * c;
    }
  }
  // pairs further apart than the band contribute gram 0
  mp.trace_gram_cov = tr.value();
  return mp;
}

BandGram BandGram::whole_line(const ScalingTable& table, int level) {
  (void)level;
  BandGram g;
  g.whole_ = true;
  g.support_ = table.support_length();
  const std::int64_t res = table.per_unit();
  const auto phi = table.phi();
  const std::int64_t ring = g.support_ * res;
  g.band_.assign(static_cast<std::size_t>(g.support_), 0.0);
  for (int d = 0; d < g.support_; ++d) {
    StableSum s;
    for (std::int64_t i = d * res; i < ring; ++i) s += phi[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(i - d * res)];
    g.band_[static_cast<std::size_t>(d)] = s.value() / static_cast<double>(res);
  }
  return g;
}

BandGram BandGram::restricted(const ScalingTable& table, int level, double lo, double hi) {
  BandGram g;
  g.whole_ = false;
  g.support_ = table.support_length();
  const int len = g.support_;
  const std::int64_t res = table.per_unit();
  const int bits = level + table.resolution();
  const auto phi = table.phi();
  const auto g_lo = static_cast<std::int64_t>(std::ceil(std::ldexp(lo, bits)));
  const auto g_hi = static_cast<std::int64_t>(std::ceil(std::ldexp(hi, bits)));
  if (g_hi <= g_lo) return g;
  g.k_first_ = floor_div(g_lo, res) - len + 1;
  const std::int64_t k_last = floor_div(g_hi - 1, res);
  g.rows_ = static_cast<std::size_t>(k_last - g.k_first_ + 1);
  g.band_.assign(g.rows_ * static_cast<std::size_t>(len), 0.0);
  for (std::size_t row = 0; row < g.rows_; ++row) {
    const std::int64_t k = g.k_first_ + static_cast<std::int64_t>(row);
    for (int d = 0; d < len; ++d) {
      const std::int64_t c0 = std::max(g_lo, (k + d) * res);
      const std::int64_t c1 = std::min(g_hi, (k + len) * res);
      double s = 0.0;
      for (std::int64_t c = c0; c < c1; ++c) {
        s += phi[static_cast<std::size_t>(c - k * res)] * phi[static_cast<std::size_t>(c - (k + d) * res)];
      }
      g.band_[row * static_cast<std::size_t>(len) + static_cast<std::size_t>(d)] = s / static_cast<double>(res);
    }
  }
  return g;
}

double BandGram::at(std::int64_t k, std::int64_t l) const noexcept {
  if (l < k) std::swap(k, l);
  const std::int64_t d = l - k;
  if (d >= support_) return 0.0;
  if (whole_) return band_[static_cast<std::size_t>(d)];
  if (k < k_first_ || k >= k_end()) return 0.0;
  return band_[static_cast<std::size_t>((k - k_first_) * support_ + d)];
}

void require_projection(const MeanProjection& projection, const DensityModel& density, const ScalingTable& table,
                        int level) {
  if (projection.alpha.empty() || projection.level != level || projection.resolution != table.resolution() ||
      projection.support != table.support_length() || projection.density_name != density.name()) {
    throw Error(ErrorCode::mean_projection_required,
                "no mean projection for " + density.name() + " at level " + std::to_string(level));
  }
}

}  // namespace wise
