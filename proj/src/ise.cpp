#include "wise/ise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wise/error.hpp"
#include "wise/numeric.hpp"
#include "wise/variance_oracle.hpp"

namespace wise {
namespace {

// phi_jk(x) = 2^{j/2} phi(2^j x - k) for the translates alive at x.
Translates level_values(const ScalingTable& table, int level, double x) {
  Translates t = table.translates(dyadic_floor(x, level + table.resolution()));
  const double s = std::sqrt(std::ldexp(1.0, level));
  for (int m = 0; m < t.count; ++m) t.value[static_cast<std::size_t>(m)] *= s;
  return t;
}

double cell_left(std::int64_t g, int bits) { return std::ldexp(static_cast<double>(g), -bits); }

}  // namespace

double centered_kernel_eval(const KernelEvaluator& ev, const DensityModel& density, int level, double t, double x,
                            int quadrature_shift) {
  ev.check_level(level);
  const int q = quadrature_shift < 0 ? ev.resolution() : quadrature_shift;
  if (q < 2) {
    throw Error(ErrorCode::quadrature_too_coarse,
                "expectation cells 2^{-(j+" + std::to_string(q) + ")} are coarser than 2^{-(j+2)}");
  }
  const int tbits = level + ev.resolution();
  const int bits = level + q;
  const std::int64_t gt = dyadic_floor(t, tbits);
  const std::int64_t unit = dyadic_floor(t, level);
  const std::int64_t len = ev.support_radius();
  const std::int64_t per = std::int64_t{1} << q;
  StableSum e;
  for (std::int64_t g = (unit - len + 1) * per; g < (unit + len) * per; ++g) {
    const double y = cell_left(g, bits);
    const double k = ev.at_grid(gt, dyadic_floor(y, tbits));
    if (k != 0.0) e += k * density.mass(y, cell_left(g + 1, bits));
  }
  return ev.at_grid(gt, dyadic_floor(x, tbits)) - e.value();
}

double hn_eval(const KernelEvaluator& ev, const MeanProjection& p, double x, double y) {
  const ScalingTable& table = ev.table();
  const int j = p.level;
  auto m = [&](double z) {
    const Translates t = table.translates(dyadic_floor(z, j + table.resolution()));
    double s = 0.0;
    for (int i = 0; i < t.count; ++i) s += p.alpha_at(t.k_first + i) * t.value[static_cast<std::size_t>(i)];
    return s / std::sqrt(std::ldexp(1.0, j));
  };
  const double q = std::ldexp(p.alpha_sq_sum, -j);
  return std::ldexp(ev.scaled(j, x, y) - m(x) - m(y) + q, -j);
}

double hn_eval_brute(const KernelEvaluator& ev, const MeanProjection& p, double x, double y) {
  const ScalingTable& table = ev.table();
  const int j = p.level;
  const int bits = j + table.resolution();
  const std::int64_t res = table.per_unit();
  const std::int64_t len = table.support_length();
  const std::int64_t gx = dyadic_floor(x, bits);
  const std::int64_t gy = dyadic_floor(y, bits);
  const std::int64_t k_lo = std::min({p.k_first, floor_div(gx, res) - len + 1, floor_div(gy, res) - len + 1});
  const std::int64_t k_hi = std::max({p.k_end() - 1, floor_div(gx, res), floor_div(gy, res)});
  const double inv = 1.0 / std::sqrt(std::ldexp(1.0, j));
  StableSum s;
  for (std::int64_t g = k_lo * res; g < (k_hi + len) * res; ++g) {
    const Translates t = table.translates(g);
    double mean = 0.0;
    for (int i = 0; i < t.count; ++i) mean += t.value[static_cast<std::size_t>(i)] * p.alpha_at(t.k_first + i);
    mean *= inv;
    s += (ev.at_grid(g, gx) - mean) * (ev.at_grid(g, gy) - mean);
  }
  return std::ldexp(s.value(), -bits);
}

double ise(const DensityEstimate& est, const DensityModel& density, const ScalingTable& table) {
  const int bits = est.level + table.resolution();
  const std::int64_t res = table.per_unit();
  const std::int64_t len = table.support_length();
  const auto phi = table.phi();
  const double s1 = std::sqrt(std::ldexp(1.0, est.level));
  const double h = std::ldexp(1.0, -bits);
  const std::int64_t k_end = est.k_first + static_cast<std::int64_t>(est.alpha_hat.size());
  StableSum acc;
  for (std::int64_t g = est.k_first * res; g < (k_end - 1 + len) * res; ++g) {
    const std::int64_t q = floor_div(g, res);
    double c = 0.0;
    for (std::int64_t k = std::max(q - len + 1, est.k_first); k <= std::min(q, k_end - 1); ++k) {
      c += est.alpha_hat[static_cast<std::size_t>(k - est.k_first)] * phi[static_cast<std::size_t>(g - k * res)];
    }
    if (c == 0.0) continue;
    c *= s1;
    acc += c * c * h - 2.0 * c * density.mass(cell_left(g, bits), cell_left(g + 1, bits));
  }
  return std::max(0.0, acc.value() + density.l2_sq());
}

double ise_coefficient(const DensityEstimate& est, const MeanProjection& p) {
  const std::int64_t e_end = est.k_first + static_cast<std::int64_t>(est.alpha_hat.size());
  const std::int64_t lo = std::min(est.k_first, p.k_first);
  const std::int64_t hi = std::max(e_end, p.k_end());
  StableSum s;
  for (std::int64_t k = lo; k < hi; ++k) {
    const double d = est.coefficient(k) - p.alpha_at(k);
    s += d * d;
  }
  return s.value() + p.bias_ise;
}

double expected_ise(const MeanProjection& p, std::size_t n) {
  return p.trace_gram_cov / static_cast<double>(n) + p.bias_ise;
}

IseBreakdown jbar_statistic(const CoefficientAccumulator& sums, const DensityModel& density, const MeanProjection& p,
                            const IseOptions& options) {
  const ScalingTable& table = sums.table();
  const int j = sums.level();
  require_projection(p, density, table, j);
  const std::size_t n = sums.count();
  if (n == 0) throw Error(ErrorCode::empty_sample, "no observations accumulated");
  const double nd = static_cast<double>(n);
  const double s1 = std::sqrt(std::ldexp(1.0, j));

  const std::int64_t lo = std::min(sums.k_first(), p.k_first);
  const std::int64_t hi = std::max(sums.k_end(), p.k_end());
  StableSum ssq;
  StableSum cross;
  for (std::int64_t k = lo; k < hi; ++k) {
    const double a = p.alpha_at(k);
    const double sk = sums.sum(k);
    const double big_s = s1 * sk - nd * a;
    ssq += big_s * big_s;
    cross += a * sk;
  }
  StableSum d;
  d += nd * p.alpha_sq_sum;
  d += std::ldexp(sums.phi_sq_total(), j);
  d += -2.0 * s1 * cross.value();

  IseBreakdown out;
  out.level = j;
  out.n = n;
  out.u_n = n >= 2 ? std::ldexp(ssq.value() - d.value(), -2 * j) : 0.0;
  out.l_n = std::ldexp(d.value() - nd * p.variance_sum, -2 * j);
  out.w_n = out.u_n + out.l_n;
  out.jbar = std::ldexp(out.w_n, 2 * j) / (nd * nd);

  if (options.quadrature_i_n) {
    DensityEstimate est;
    est.level = j;
    est.n = n;
    est.k_first = sums.k_first();
    for (double s : sums.sums()) est.alpha_hat.push_back(s1 * s / nd);
    out.i_n = ise(est, density, table);
    out.quadrature_i_n = true;
  } else {
    out.i_n = ssq.value() / (nd * nd) + p.bias_ise;
  }
  out.expected_i_n = expected_ise(p, n);
  out.j_n_stat = out.i_n - out.expected_i_n;
  out.t_n = nd * out.jbar / (std::sqrt(std::ldexp(1.0, j)) * std::sqrt(2.0 * density.l2_sq()));
  return out;
}

IseBreakdown jbar_statistic(const Sample& sample, const KernelEvaluator& evaluator, const DensityModel& density,
                            int level, const MeanProjection& projection, const IseOptions& options) {
  require_projection(projection, density, evaluator.table(), level);
  if (sample.values.empty()) throw Error(ErrorCode::empty_sample, "cannot evaluate an empty sample");
  CoefficientAccumulator acc(evaluator.table_ptr(), level);
  acc.add(sample.values);
  return jbar_statistic(acc, density, projection, options);
}

PairStatistics pair_statistics_brute(const Sample& sample, const KernelEvaluator& evaluator,
                                     const MeanProjection& projection) {
  const auto& x = sample.values;
  const double eh = std::ldexp(projection.variance_sum, -2 * projection.level);
  StableSum u;
  StableSum l;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) u += 2.0 * hn_eval(evaluator, projection, x[i], x[k]);
    l += hn_eval(evaluator, projection, x[i], x[i]) - eh;
  }
  PairStatistics out;
  out.u_n = u.value();
  out.l_n = l.value();
  out.w_n = out.u_n + out.l_n;
  return out;
}

double expected_h_squared(const MeanProjection& p, const DensityModel& density, const ScalingTable& table) {
  const int j = p.level;
  const int bits = j + table.resolution();
  const std::int64_t res = table.per_unit();
  const int len = table.support_length();
  const std::size_t count = p.alpha.size();

  std::vector<double> mom_alpha(count, 0.0);
  StableSum a_m_a;
  for (std::size_t i = 0; i < count; ++i) {
    const std::int64_t k = p.k_first + static_cast<std::int64_t>(i);
    double s = 0.0;
    for (std::int64_t l = k - len + 1; l < k + len; ++l) s += p.moment_at(k, l) * p.alpha_at(l);
    mom_alpha[i] = s;
    a_m_a += p.alpha[i] * s;
  }
  auto mom_alpha_at = [&](std::int64_t k) {
    return (k >= p.k_first && k < p.k_end()) ? mom_alpha[static_cast<std::size_t>(k - p.k_first)] : 0.0;
  };
  const double s1 = std::sqrt(std::ldexp(1.0, j));
  StableSum total;
  for (std::int64_t g = p.k_first * res; g < (p.k_end() - 1 + len) * res; ++g) {
    const double w = density.mass(cell_left(g, bits), cell_left(g + 1, bits));
    if (w == 0.0) continue;
    const Translates t = table.translates(g);
    double pmp = 0.0;
    double amp = 0.0;
    double ap = 0.0;
    for (int m = 0; m < t.count; ++m) {
      const double pm = s1 * t.value[static_cast<std::size_t>(m)];
      const std::int64_t km = t.k_first + m;
      for (int m2 = 0; m2 < t.count; ++m2) {
        pmp += pm * s1 * t.value[static_cast<std::size_t>(m2)] * p.moment_at(km, t.k_first + m2);
      }
      amp += pm * mom_alpha_at(km);
      ap += pm * p.alpha_at(km);
    }
    const double vmv = pmp - 2.0 * amp + a_m_a.value();
    const double av = ap - p.alpha_sq_sum;
    total += w * (vmv - av * av);
  }
  return std::ldexp(total.value(), -4 * j);
}

MartingaleDecomposition martingale_decompose(const Sample& sample, const KernelEvaluator& evaluator,
                                             const DensityModel& density, int level, const MeanProjection& p) {
  require_projection(p, density, evaluator.table(), level);
  const std::size_t n = sample.values.size();
  if (n < 2) throw Error(ErrorCode::need_two_points, "martingale form needs n >= 2, got " + std::to_string(n));
  const ScalingTable& table = evaluator.table();

  MartingaleDecomposition out;
  out.level = level;
  out.n = n;
  out.e_n_sq = e_n_squared(p, table);
  const double nd = static_cast<double>(n);
  out.s_n_sq = nd * (nd - 1.0) / 2.0 * std::ldexp(out.e_n_sq, -3 * level);
  out.expected_h_sq = expected_h_squared(p, density, table);
  StableSum direct;
  for (std::size_t i = 2; i <= n; ++i) direct += static_cast<double>(i - 1) * out.expected_h_sq;
  out.s_n_sq_direct = direct.value();

  const double s_n = std::sqrt(out.s_n_sq);
  CoefficientAccumulator acc(evaluator.table_ptr(), level);
  const double s1 = std::sqrt(std::ldexp(1.0, level));
  double a_dot_t = 0.0;  // sum_k alpha_k T_k, T_k = sum_{l < i} phi_jk(X_l)
  out.x_ni.assign(n, 0.0);
  StableSum u;
  for (std::size_t i = 0; i < n; ++i) {
    const Translates t = level_values(table, level, sample.values[i]);
    const double prev = static_cast<double>(i);
    if (i > 0) {
      double s = 0.0;
      for (int m = 0; m < t.count; ++m) {
        const std::int64_t k = t.k_first + m;
        s += t.value[static_cast<std::size_t>(m)] * (s1 * acc.sum(k) - prev * p.alpha_at(k));
      }
      const double y = std::ldexp(s - a_dot_t + prev * p.alpha_sq_sum, -2 * level);
      out.x_ni[i] = y / s_n;
      u += y;
    }
    acc.add(sample.values[i]);
    for (int m = 0; m < t.count; ++m) a_dot_t += t.value[static_cast<std::size_t>(m)] * p.alpha_at(t.k_first + m);
  }
  out.u_nn = u.value();
  out.s_nn = out.u_nn / s_n;
  return out;
}

RestrictedWEvaluator::RestrictedWEvaluator(const KernelEvaluator& evaluator, const MeanProjection& projection,
                                           double box_radius)
    : table_(evaluator.table_ptr()),
      projection_(&projection),
      box_radius_(box_radius),
      gram_(BandGram::restricted(evaluator.table(), projection.level, -box_radius, box_radius)) {
  const MeanProjection& p = projection;
  const int len = gram_.support();
  k_first_ = gram_.k_first();
  const std::int64_t rows = gram_.k_end() - gram_.k_first();
  gram_alpha_.assign(static_cast<std::size_t>(std::max<std::int64_t>(rows, 0)), 0.0);
  StableSum aga;
  StableSum gm;
  for (std::int64_t k = gram_.k_first(); k < gram_.k_end(); ++k) {
    double s = 0.0;
    for (std::int64_t l = k - len + 1; l < k + len; ++l) {
      const double g = gram_.at(k, l);
      s += g * p.alpha_at(l);
      gm += g * p.moment_at(k, l);
    }
    gram_alpha_[static_cast<std::size_t>(k - k_first_)] = s;
    aga += p.alpha_at(k) * s;
  }
  alpha_gram_alpha_ = aga.value();
  trace_gram_cov_ = gm.value() - alpha_gram_alpha_;
}

double RestrictedWEvaluator::h(double x, double y) const {
  const int j = projection_->level;
  const Translates tx = level_values(*table_, j, x);
  const Translates ty = level_values(*table_, j, y);
  auto ga = [&](std::int64_t k) {
    const std::int64_t i = k - k_first_;
    return (i >= 0 && i < static_cast<std::int64_t>(gram_alpha_.size())) ? gram_alpha_[static_cast<std::size_t>(i)] : 0.0;
  };
  double pgp = 0.0;
  double gx = 0.0;
  double gy = 0.0;
  for (int a = 0; a < tx.count; ++a) {
    for (int b = 0; b < ty.count; ++b) {
      pgp += tx.value[static_cast<std::size_t>(a)] * ty.value[static_cast<std::size_t>(b)] *
             gram_.at(tx.k_first + a, ty.k_first + b);
    }
    gx += tx.value[static_cast<std::size_t>(a)] * ga(tx.k_first + a);
  }
  for (int b = 0; b < ty.count; ++b) gy += ty.value[static_cast<std::size_t>(b)] * ga(ty.k_first + b);
  return std::ldexp(pgp - gx - gy + alpha_gram_alpha_, -2 * j);
}

RestrictedW RestrictedWEvaluator::operator()(std::span<const double> xs) const {
  const MeanProjection& p = *projection_;
  const int j = p.level;
  const int len = gram_.support();
  const double nd = static_cast<double>(xs.size());
  const std::size_t rows = gram_alpha_.size();
  std::vector<double> t_sum(rows, 0.0);
  StableSum diag;
  for (double x : xs) {
    const Translates t = level_values(*table_, j, x);
    double pgp = 0.0;
    double ga = 0.0;
    for (int a = 0; a < t.count; ++a) {
      const std::int64_t ka = t.k_first + a;
      const double va = t.value[static_cast<std::size_t>(a)];
      for (int b = 0; b < t.count; ++b) pgp += va * t.value[static_cast<std::size_t>(b)] * gram_.at(ka, t.k_first + b);
      const std::int64_t i = ka - k_first_;
      if (i >= 0 && i < static_cast<std::int64_t>(rows)) {
        ga += va * gram_alpha_[static_cast<std::size_t>(i)];
        t_sum[static_cast<std::size_t>(i)] += va;
      }
    }
    diag += pgp - 2.0 * ga + alpha_gram_alpha_;
  }
  // S_k = T_k - n alpha_k over the rows of G_F
  std::vector<double> big_s(rows);
  for (std::size_t i = 0; i < rows; ++i) big_s[i] = t_sum[i] - nd * p.alpha_at(k_first_ + static_cast<std::int64_t>(i));
  StableSum sgs;
  for (std::size_t i = 0; i < rows; ++i) {
    const std::int64_t k = k_first_ + static_cast<std::int64_t>(i);
    double s = gram_.at(k, k) * big_s[i];
    for (int d = 1; d < len && i + static_cast<std::size_t>(d) < rows; ++d) {
      s += 2.0 * gram_.at(k, k + d) * big_s[i + static_cast<std::size_t>(d)];
    }
    sgs += big_s[i] * s;
  }
  RestrictedW out;
  out.box_radius = box_radius_;
  out.u_n = xs.size() >= 2 ? std::ldexp(sgs.value() - diag.value(), -2 * j) : 0.0;
  out.l_n = std::ldexp(diag.value() - nd * trace_gram_cov_, -2 * j);
  out.w_n = out.u_n + out.l_n;
  return out;
}

RestrictedW wn_restricted(const Sample& sample, const KernelEvaluator& evaluator, const MeanProjection& projection,
                          double box_radius) {
  return RestrictedWEvaluator(evaluator, projection, box_radius)(sample.values);
}

RestrictedW wn_restricted_brute(const Sample& sample, const KernelEvaluator& evaluator,
                                const MeanProjection& projection, double box_radius) {
  const RestrictedWEvaluator w(evaluator, projection, box_radius);
  const auto& x = sample.values;
  const double eh = std::ldexp(
      [&] {
        // E H_{n,F}(X, X) = 2^{-2j} tr(G_F Cov)
        const BandGram g = BandGram::restricted(evaluator.table(), projection.level, -box_radius, box_radius);
        StableSum s;
        const int len = g.support();
        for (std::int64_t k = g.k_first(); k < g.k_end(); ++k) {
          for (std::int64_t l = k - len + 1; l < k + len; ++l) s += g.at(k, l) * projection.cov_at(k, l);
        }
        return s.value();
      }(),
      -2 * projection.level);
  StableSum u;
  StableSum l;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) u += 2.0 * w.h(x[i], x[k]);
    l += w.h(x[i], x[i]) - eh;
  }
  RestrictedW out;
  out.box_radius = box_radius;
  out.u_n = u.value();
  out.l_n = l.value();
  out.w_n = out.u_n + out.l_n;
  return out;
}

}  // namespace wise
