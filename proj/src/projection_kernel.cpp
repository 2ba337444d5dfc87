#include "wise/projection_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wise/error.hpp"
#include "wise/numeric.hpp"
#include "wise/rng.hpp"

namespace wise {

KernelEvaluator::KernelEvaluator(std::shared_ptr<const ScalingTable> table) : table_(std::move(table)) {
  if (!table_) throw Error(ErrorCode::invalid_config, "kernel evaluator needs a scaling table");
}

double KernelEvaluator::at_grid(std::int64_t gx, std::int64_t gy) const noexcept {
  const Translates tx = table_->translates(gx);
  const Translates ty = table_->translates(gy);
  const std::int64_t lo = std::max(tx.k_first, ty.k_first);
  const std::int64_t hi = std::min(tx.k_first, ty.k_first) + tx.count;
  double s = 0.0;
  for (std::int64_t k = lo; k < hi; ++k) {
    s += tx.value[static_cast<std::size_t>(k - tx.k_first)] * ty.value[static_cast<std::size_t>(k - ty.k_first)];
  }
  return s;
}

double KernelEvaluator::operator()(double x, double y) const noexcept {
  const int r = resolution();
  return at_grid(dyadic_floor(x, r), dyadic_floor(y, r));
}

void KernelEvaluator::check_level(int j) const {
  if (j < 0 || j + resolution() > kMaxScaledBits) {
    throw Error(ErrorCode::level_too_fine, "level " + std::to_string(j) + " with table resolution " +
                                               std::to_string(resolution()) + " exceeds " +
                                               std::to_string(kMaxScaledBits) + " grid bits");
  }
}

double KernelEvaluator::scaled(int j, double x, double y) const {
  check_level(j);
  const int bits = j + resolution();
  return at_grid(dyadic_floor(x, bits), dyadic_floor(y, bits));
}

double kernel_eval(const KernelEvaluator& evaluator, double x, double y) { return evaluator(x, y); }

KernelIdentityReport kernel_identity_checks(const KernelEvaluator& ev, const KernelCheckSpec& spec) {
  KernelIdentityReport rep;
  const int r = ev.resolution();
  const std::int64_t res = ev.table().per_unit();
  const std::int64_t a = ev.support_radius();
  const int p = std::max(spec.probe_points, 1);
  rep.probe_points = p;

  // Probe points spread over [-1, A + 1), snapped to the table grid.
  std::vector<std::int64_t> probe(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    probe[static_cast<std::size_t>(i)] = -res + static_cast<std::int64_t>(i) * (a + 2) * res / p;
  }

  // K(x, y_i) on cells of width 2^{-q} covering every probe's support.
  const int q = std::clamp(spec.reproducing_level, 0, r);
  const std::int64_t stride = std::int64_t{1} << (r - q);
  const std::int64_t x_lo = floor_div(probe.front() - a * res, stride);
  const std::int64_t x_hi = floor_div(probe.back() + a * res, stride) + 1;
  const auto span = static_cast<std::size_t>(x_hi - x_lo);
  std::vector<std::vector<double>> columns(probe.size(), std::vector<double>(span));
  for (std::size_t i = 0; i < probe.size(); ++i) {
    for (std::size_t c = 0; c < span; ++c) {
      columns[i][c] = ev.at_grid((x_lo + static_cast<std::int64_t>(c)) * stride, probe[i]);
    }
  }
  const double cell = std::ldexp(1.0, -q);
  for (std::size_t i = 0; i < probe.size(); ++i) {
    for (std::size_t k = 0; k < probe.size(); ++k) {
      StableSum s;
      for (std::size_t c = 0; c < span; ++c) s += columns[i][c] * columns[k][c];
      const double kyz = ev.at_grid(probe[i], probe[k]);
      rep.reproducing_residual = std::max(rep.reproducing_residual, std::abs(s.value() * cell - kyz));
      rep.periodicity_residual =
          std::max(rep.periodicity_residual, std::abs(ev.at_grid(probe[i] + res, probe[k] + res) - kyz));
      rep.symmetry_residual = std::max(rep.symmetry_residual, std::abs(ev.at_grid(probe[k], probe[i]) - kyz));
    }
  }

  const MajorantSpec maj = make_majorant(ev.table());
  const CounterStream stream(spec.seed, 0);
  rep.majorant_pairs = spec.majorant_pairs;
  for (std::size_t i = 0; i < spec.majorant_pairs; ++i) {
    const double x = -5.0 + 10.0 * stream.uniform(2 * i);
    const double y = x + (2.0 * stream.uniform(2 * i + 1) - 1.0) * (a + 1);
    if (std::abs(ev(x, y)) > maj(x - y) * (1.0 + 1e-12)) ++rep.majorant_violations;
  }

  {
    const int qf = std::clamp(spec.quadruple_fast_level, 0, r);
    const std::int64_t st = std::int64_t{1} << (r - qf);
    const std::int64_t per = std::int64_t{1} << qf;
    StableSum s;
    for (std::int64_t xi = 0; xi < per; ++xi) {
      for (std::int64_t ui = -2 * a * per; ui < 2 * a * per; ++ui) {
        const double k = ev.at_grid(xi * st, (xi - ui) * st);
        s += k * k;
      }
    }
    rep.quadruple_fast = s.value() * std::ldexp(1.0, -2 * qf);
    rep.quadruple_fast_level = qf;
  }

  if (spec.quadruple_brute_level >= 0) {
    const int qb = std::min(spec.quadruple_brute_level, r);
    const std::int64_t st = std::int64_t{1} << (r - qb);
    const std::int64_t per = std::int64_t{1} << qb;
    const double h = std::ldexp(1.0, -qb);
    StableSum s;
    for (std::int64_t xi = 0; xi < per; ++xi) {
      for (std::int64_t ui = -2 * a * per; ui < 2 * a * per; ++ui) {
        // The integrand factors as g(z) g(w), so the z-w tensor sum is a square.
        double inner = 0.0;
        for (std::int64_t zi = -a * per; zi < a * per; ++zi) {
          inner += ev.at_grid((xi + zi) * st, xi * st) * ev.at_grid((xi + zi) * st, (xi - ui) * st);
        }
        inner *= h;
        s += inner * inner;
      }
    }
    rep.quadruple_brute = s.value() * h * h;
    rep.quadruple_brute_level = qb;
    rep.brute_evaluated = true;
  }
  return rep;
}

}  // namespace wise
