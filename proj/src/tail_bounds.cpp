#include "wise/tail_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>

#include "wise/error.hpp"
#include "wise/estimator.hpp"
#include "wise/ise.hpp"
#include "wise/numeric.hpp"
#include "wise/parallel.hpp"

namespace wise {

TailBoundInputs glz_constants(const DensityModel& density, const MajorantSpec& majorant, int level, std::size_t m,
                              Interval window) {
  if (m < 2) throw Error(ErrorCode::invalid_config, "the pair-sum constants need m >= 2");
  const double f_sq = density.sq_mass(window.lo, window.hi);
  if (!(f_sq > 0.0)) throw Error(ErrorCode::degenerate_window, "the density has no L2 mass on the window");
  const double md = static_cast<double>(m);
  const double l1 = majorant.l1_norm;
  const double l2sq = majorant.l2_sq;
  TailBoundInputs in;
  in.m = m;
  in.n = m;
  in.level = level;
  in.window = window;
  in.f_sq_window = f_sq;
  in.a_const = 4.0 * std::ldexp(l2sq, -level);
  in.b_const = std::sqrt(16.0 * md * std::ldexp(l2sq * l2sq, -2 * level));
  in.c_const = std::sqrt(2.0 * md * md * std::ldexp(l1 * l1 * l2sq * f_sq, -3 * level));
  in.d_const = 4.0 * md * std::ldexp(density.sup_norm() * l1 * l1, -2 * level);
  return in;
}

double glz_tail(const TailBoundInputs& in, double x, double l_const) {
  if (!(x > 0.0) || !(l_const > 0.0)) throw Error(ErrorCode::invalid_config, "tail bound needs x > 0 and L > 0");
  const double e = std::min({x * x / (in.c_const * in.c_const), x / in.d_const,
                             std::cbrt(x * x) / std::cbrt(in.b_const * in.b_const), std::sqrt(x / in.a_const)});
  return l_const * std::exp(-e / l_const);
}

double wn_tail_bound(double tau, double n, int level, double kappa0, double f_sq_window) {
  const double pj = std::ldexp(1.0, level);
  const double e = std::min({tau * tau / f_sq_window, std::sqrt(pj) * tau,
                             std::cbrt(tau * tau) * std::cbrt(n) / std::cbrt(pj),
                             std::sqrt(tau) * std::sqrt(n) / std::pow(pj, 0.25), tau * tau * n / pj,
                             tau * n / std::sqrt(pj)});
  return kappa0 * std::exp(-e / kappa0);
}

double wn_tail_bound_loglog(double eta, double n, double kappa0, double f_sq_window) {
  return kappa0 * std::exp(-eta * eta * std::log(std::log(n)) / (kappa0 * f_sq_window));
}

double bernstein_diag_bound(double tau, double m, double n, int level, double phi_l2sq) {
  const double num = tau * tau * n * n * std::ldexp(1.0, -3 * level);
  const double den = 8.0 * m * std::ldexp(phi_l2sq * phi_l2sq, -2 * level) +
                     16.0 / 3.0 * tau * n * std::pow(2.0, -2.5 * level) * phi_l2sq;
  return 2.0 * std::exp(-num / den);
}

double calibrate_constant(const std::function<double(double, std::size_t)>& bound, std::span<const double> target,
                          double lo, double hi) {
  double best = lo;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (bound(best, i) >= target[i]) continue;
    if (bound(hi, i) < target[i]) return hi;
    double a = best;
    double b = hi;
    for (int it = 0; it < 200 && b > a * (1.0 + 1e-12); ++it) {
      const double mid = std::sqrt(a * b);
      if (bound(mid, i) >= target[i]) {
        b = mid;
      } else {
        a = mid;
      }
    }
    best = b;
  }
  return best;
}

TailComparison tail_comparison(const DensityModel& density, const KernelEvaluator& evaluator,
                               const TailComparisonSpec& spec) {
  if (spec.n_list.empty() || spec.replications == 0) throw Error(ErrorCode::invalid_config, "empty tail comparison");
  const BandwidthSchedule schedule = make_schedule(spec.delta);
  const MajorantSpec maj = make_majorant(evaluator.table());
  const Interval box{-spec.box_radius, spec.box_radius};
  std::vector<std::size_t> ns = spec.n_list;
  std::sort(ns.begin(), ns.end());

  struct Freqs {
    std::size_t n;
    int level;
    std::vector<double> diag, offdiag, window;
  };
  std::vector<Freqs> table;
  for (std::size_t n : ns) {
    const int j = schedule.level(static_cast<double>(n));
    const MeanProjection proj = projection_mean(density, evaluator, j);
    const RestrictedWEvaluator wf(evaluator, proj, spec.box_radius);
    std::vector<double> l_vals(spec.replications);
    std::vector<RestrictedW> w_vals(spec.replications);
    parallel_for(spec.replications, spec.threads, [&](std::size_t r) {
      const Sample s = sample(density, n, spec.seed, (static_cast<std::uint64_t>(n) << 32) + r);
      l_vals[r] = jbar_statistic(s, evaluator, density, j, proj).l_n;
      w_vals[r] = wf(s.values);
    });
    Freqs fr{n, j, {}, {}, {}};
    const double scale = static_cast<double>(n) * std::pow(2.0, -1.5 * j);
    for (double tau : spec.taus) {
      std::size_t cd = 0;
      std::size_t co = 0;
      std::size_t cw = 0;
      for (std::size_t r = 0; r < spec.replications; ++r) {
        if (std::abs(l_vals[r]) > tau * scale) ++cd;
        if (std::abs(w_vals[r].u_n) >= tau * scale) ++co;
        if (std::abs(w_vals[r].w_n) >= tau * scale) ++cw;
      }
      const double rr = static_cast<double>(spec.replications);
      fr.diag.push_back(static_cast<double>(cd) / rr);
      fr.offdiag.push_back(static_cast<double>(co) / rr);
      fr.window.push_back(static_cast<double>(cw) / rr);
    }
    table.push_back(std::move(fr));
  }

  TailComparison out;
  const Freqs& first = table.front();
  // Calibrate against a 3-sigma binomial upper limit, so replication noise
  // alone cannot produce a crossing at the larger sizes.
  const double rr = static_cast<double>(spec.replications);
  auto upper = [rr](std::vector<double> f) {
    for (double& p : f) p = std::min(1.0, p + 3.0 * std::sqrt(std::max(p * (1.0 - p), 1.0 / rr) / rr));
    return f;
  };
  const std::vector<double> offdiag_target = upper(first.offdiag);
  const std::vector<double> window_target = upper(first.window);
  const TailBoundInputs in0 = glz_constants(density, maj, first.level, first.n, box);
  const double scale0 = static_cast<double>(first.n) * std::pow(2.0, -1.5 * first.level);
  out.l_const = calibrate_constant(
      [&](double c, std::size_t i) { return glz_tail(in0, spec.taus[i] * scale0, c); }, offdiag_target);
  out.kappa0 = calibrate_constant(
      [&](double c, std::size_t i) {
        return wn_tail_bound(spec.taus[i], static_cast<double>(first.n), first.level, c, in0.f_sq_window);
      },
      window_target);

  for (const Freqs& fr : table) {
    const TailBoundInputs in = glz_constants(density, maj, fr.level, fr.n, box);
    const double nd = static_cast<double>(fr.n);
    const double scale = nd * std::pow(2.0, -1.5 * fr.level);
    for (std::size_t t = 0; t < spec.taus.size(); ++t) {
      const double tau = spec.taus[t];
      auto push = [&](const char* kind, double bound, double freq) {
        TailRow row{kind, tau, bound, freq, fr.n, fr.level, freq <= bound};
        out.all_below = out.all_below && row.below;
        out.rows.push_back(row);
      };
      push("bernstein_diag", bernstein_diag_bound(tau, nd, nd, fr.level, maj.l2_sq), fr.diag[t]);
      push("glz_offdiag", glz_tail(in, tau * scale, out.l_const), fr.offdiag[t]);
      push("wn_window", wn_tail_bound(tau, nd, fr.level, out.kappa0, in.f_sq_window), fr.window[t]);
    }
  }
  return out;
}

void write_tail_csv(const TailComparison& comparison, std::ostream& out) {
  out << "kind,tau,bound,empirical_freq,n,j\n";
  for (const auto& r : comparison.rows) {
    out << r.kind << ',' << format_double(r.tau) << ',' << format_double(r.bound) << ','
        << format_double(r.empirical_freq) << ',' << r.n << ',' << r.level << '\n';
  }
}

MomentEstimate moment_estimates(const std::function<double(double, double)>& h,
                                const std::function<double(double, double)>& g, std::span<const double> xs) {
  std::vector<double> h4;
  std::vector<double> g2;
  for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
    const double hv = h(xs[i], xs[i + 1]);
    const double gv = g(xs[i], xs[i + 1]);
    h4.push_back(hv * hv * hv * hv);
    g2.push_back(gv * gv);
  }
  const MeanStat a = mean_stat(h4);
  const MeanStat b = mean_stat(g2);
  return {a.mean, a.std_error, b.mean, b.std_error};
}

namespace {

// G_n(x,y) = E H_n(X,x) H_n(X,y) = 2^{-4j} v(x)^T Cov v(y) with v = phi_j. - alpha.
class GKernel {
 public:
  GKernel(std::shared_ptr<const ScalingTable> table, const MeanProjection& proj) : table_(std::move(table)), p_(proj) {
    const std::size_t dim = proj.alpha.size();
    cov_alpha_.assign(dim, 0.0);
    for (std::size_t a = 0; a < dim; ++a) {
      const std::int64_t k = proj.k_first + static_cast<std::int64_t>(a);
      double s = 0.0;
      for (std::int64_t l = k - proj.support + 1; l < k + proj.support; ++l) s += proj.moment_at(k, l) * proj.alpha_at(l);
      cov_alpha_[a] = s - proj.alpha[a] * proj.alpha_sq_sum;
    }
    for (std::size_t a = 0; a < dim; ++a) alpha_cov_alpha_ += proj.alpha[a] * cov_alpha_[a];
  }

  double operator()(double x, double y) const {
    const Translates tx = values(x);
    const Translates ty = values(y);
    double mom = 0.0;
    for (int a = 0; a < tx.count; ++a) {
      for (int b = 0; b < ty.count; ++b) {
        mom += tx.value[static_cast<std::size_t>(a)] * ty.value[static_cast<std::size_t>(b)] *
               p_.moment_at(tx.k_first + a, ty.k_first + b);
      }
    }
    const double ax = dot_alpha(tx);
    const double ay = dot_alpha(ty);
    const double s = mom - ax * ay - dot_cov_alpha(tx) - dot_cov_alpha(ty) + alpha_cov_alpha_;
    return std::ldexp(s, -4 * p_.level);
  }

 private:
  Translates values(double x) const {
    Translates t = table_->translates(dyadic_floor(x, p_.level + table_->resolution()));
    const double s = std::sqrt(std::ldexp(1.0, p_.level));
    for (int m = 0; m < t.count; ++m) t.value[static_cast<std::size_t>(m)] *= s;
    return t;
  }
  double dot_alpha(const Translates& t) const {
    double s = 0.0;
    for (int m = 0; m < t.count; ++m) s += t.value[static_cast<std::size_t>(m)] * p_.alpha_at(t.k_first + m);
    return s;
  }
  double dot_cov_alpha(const Translates& t) const {
    double s = 0.0;
    for (int m = 0; m < t.count; ++m) {
      const std::int64_t k = t.k_first + m;
      if (k >= p_.k_first && k < p_.k_end()) {
        s += t.value[static_cast<std::size_t>(m)] * cov_alpha_[static_cast<std::size_t>(k - p_.k_first)];
      }
    }
    return s;
  }

  std::shared_ptr<const ScalingTable> table_;
  const MeanProjection& p_;
  std::vector<double> cov_alpha_;
  double alpha_cov_alpha_ = 0.0;
};

}  // namespace

ScalingReport moment_scaling_probe(const DensityModel& density, const KernelEvaluator& evaluator,
                                   std::span<const int> levels, std::size_t pairs, std::uint64_t seed,
                                   unsigned threads) {
  if (pairs == 0) throw Error(ErrorCode::invalid_config, "moment probe needs at least one pair");
  ScalingReport rep;
  std::vector<double> xs_fit_h;
  std::vector<double> ys_fit_h;
  std::vector<double> xs_fit_g;
  std::vector<double> ys_fit_g;
  for (int j : levels) {
    const MeanProjection proj = projection_mean(density, evaluator, j);
    const GKernel g(evaluator.table_ptr(), proj);
    const Sample s = sample(density, 2 * pairs, seed, static_cast<std::uint64_t>(j));
    std::vector<double> h4(pairs);
    std::vector<double> g2(pairs);
    constexpr std::size_t chunk = 1024;
    parallel_for((pairs + chunk - 1) / chunk, threads, [&](std::size_t c) {
      for (std::size_t i = c * chunk; i < std::min(pairs, (c + 1) * chunk); ++i) {
        const double x = s.values[2 * i];
        const double y = s.values[2 * i + 1];
        const double hv = hn_eval(evaluator, proj, x, y);
        const double gv = g(x, y);
        h4[i] = hv * hv * hv * hv;
        g2[i] = gv * gv;
      }
    });
    const MeanStat a = mean_stat(h4);
    const MeanStat b = mean_stat(g2);
    rep.levels.push_back(j);
    rep.e_h4.push_back(a.mean);
    rep.e_h4_se.push_back(a.std_error);
    rep.e_g2.push_back(b.mean);
    rep.e_g2_se.push_back(b.std_error);
    if (a.mean > 0.0) {
      xs_fit_h.push_back(j);
      ys_fit_h.push_back(std::log2(a.mean));
    }
    if (b.mean > 0.0) {
      xs_fit_g.push_back(j);
      ys_fit_g.push_back(std::log2(b.mean));
    }
  }
  if (xs_fit_h.size() >= 2) {
    const LinearFit f = fit_line(xs_fit_h, ys_fit_h);
    rep.slope_h4 = f.slope;
    rep.slope_h4_se = f.slope_se;
  }
  if (xs_fit_g.size() >= 2) {
    const LinearFit f = fit_line(xs_fit_g, ys_fit_g);
    rep.slope_g2 = f.slope;
    rep.slope_g2_se = f.slope_se;
  }
  return rep;
}

void write_scaling_csv(const ScalingReport& report, std::ostream& out) {
  out << "j,e_h4,e_h4_se,e_g2,e_g2_se\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    out << report.levels[i] << ',' << format_double(report.e_h4[i]) << ',' << format_double(report.e_h4_se[i]) << ','
        << format_double(report.e_g2[i]) << ',' << format_double(report.e_g2_se[i]) << '\n';
  }
}

}  // namespace wise
