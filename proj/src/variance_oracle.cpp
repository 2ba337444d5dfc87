#include "wise/variance_oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "wise/error.hpp"
#include "wise/ise.hpp"
#include "wise/numeric.hpp"
#include "wise/rng.hpp"

namespace wise {
namespace {

using Sparse = Eigen::SparseMatrix<double>;

Sparse band_matrix(std::int64_t k_first, Eigen::Index dim, int len,
                   const std::function<double(std::int64_t, std::int64_t)>& entry) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(dim) * static_cast<std::size_t>(2 * len - 1));
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index k = std::max<Eigen::Index>(0, i - len + 1); k < std::min<Eigen::Index>(dim, i + len); ++k) {
      const double v = entry(k_first + i, k_first + k);
      if (v != 0.0) trip.emplace_back(i, k, v);
    }
  }
  Sparse m(dim, dim);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

// tr(C G C G) for C = M - a a^T
double trace_cov_gram(const Sparse& m, const Sparse& g, const Eigen::VectorXd& a) {
  const Sparse mg = m * g;
  const double t_mm = mg.cwiseProduct(Sparse(mg.transpose())).sum();
  const Eigen::VectorXd ga = g * a;
  const double a_g_m_g_a = ga.dot(m * ga);
  const double aga = a.dot(ga);
  return t_mm - 2.0 * a_g_m_g_a + aga * aga;
}

double trace_mom_gram(const Sparse& m, const Sparse& g) {
  const Sparse mg = m * g;
  return mg.cwiseProduct(Sparse(mg.transpose())).sum();
}

Translates level_values(const ScalingTable& table, int level, double x) {
  Translates t = table.translates(dyadic_floor(x, level + table.resolution()));
  const double s = std::sqrt(std::ldexp(1.0, level));
  for (int m = 0; m < t.count; ++m) t.value[static_cast<std::size_t>(m)] *= s;
  return t;
}

double bilinear(const MeanProjection& p, const Translates& a, const Translates& b, bool centered) {
  double s = 0.0;
  for (int i = 0; i < a.count; ++i) {
    for (int k = 0; k < b.count; ++k) {
      s += a.value[static_cast<std::size_t>(i)] * b.value[static_cast<std::size_t>(k)] *
           p.moment_at(a.k_first + i, b.k_first + k);
    }
  }
  if (centered) {
    double aa = 0.0;
    double bb = 0.0;
    for (int i = 0; i < a.count; ++i) aa += a.value[static_cast<std::size_t>(i)] * p.alpha_at(a.k_first + i);
    for (int k = 0; k < b.count; ++k) bb += b.value[static_cast<std::size_t>(k)] * p.alpha_at(b.k_first + k);
    s -= aa * bb;
  }
  return std::ldexp(s, -p.level);
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    // the dense QL iteration in Eigen 3.4.0 can stall on highly degenerate spectra
    const Eigen::Tridiagonalization<Eigen::MatrixXd> tri(m);
    es.computeFromTridiagonal(tri.diagonal(), tri.subDiagonal(), Eigen::EigenvaluesOnly);
  }
  if (es.info() != Eigen::Success) throw Error(ErrorCode::eigen_failure, std::string(what) + " eigensolve did not converge");
  return es.eigenvalues();
}

Eigen::MatrixXd dense_r(const CovKernels& cov) {
  if (cov.r_matrix.size() > 0) return cov.r_matrix;
  const auto n = static_cast<Eigen::Index>(cov.nodes.size());
  std::vector<Translates> tv;
  tv.reserve(cov.nodes.size());
  for (double t : cov.nodes) tv.push_back(level_values(*cov.table, cov.level, t));
  Eigen::MatrixXd r(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) {
      r(a, b) = bilinear(*cov.projection, tv[static_cast<std::size_t>(a)], tv[static_cast<std::size_t>(b)], true);
      r(b, a) = r(a, b);
    }
  }
  return r;
}

}  // namespace

double e_n_squared(const MeanProjection& p, const ScalingTable& table) {
  const auto dim = static_cast<Eigen::Index>(p.alpha.size());
  const int len = p.support;
  const Sparse m = band_matrix(p.k_first, dim, len, [&](std::int64_t k, std::int64_t l) { return p.moment_at(k, l); });
  const BandGram gl = BandGram::whole_line(table, p.level);
  const Sparse g = band_matrix(p.k_first, dim, len, [&](std::int64_t k, std::int64_t l) { return gl.at(k, l); });
  const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(p.alpha.data(), dim);
  return std::ldexp(trace_cov_gram(m, g, a), -p.level);
}

double CovKernels::c_value(double t, double s) const {
  return bilinear(*projection, level_values(*table, level, t), level_values(*table, level, s), false);
}

double CovKernels::r_value(double t, double s) const {
  return bilinear(*projection, level_values(*table, level, t), level_values(*table, level, s), true);
}

CovKernels cov_kernels(const DensityModel& density, const KernelEvaluator& evaluator, int level, double box_radius,
                       const CovGridSpec& spec) {
  return cov_kernels(std::make_shared<const MeanProjection>(projection_mean(density, evaluator, level)), evaluator,
                     box_radius, spec);
}

CovKernels cov_kernels(std::shared_ptr<const MeanProjection> projection, const KernelEvaluator& evaluator,
                       double box_radius, const CovGridSpec& spec) {
  if (!projection) throw Error(ErrorCode::mean_projection_required, "covariance kernels need a mean projection");
  if (!(box_radius > 0.0)) throw Error(ErrorCode::invalid_config, "box radius M must be positive");
  const int j = projection->level;
  if (spec.grid_shift < 2) {
    throw Error(ErrorCode::quadrature_too_coarse,
                "node spacing 2^{-(j+" + std::to_string(spec.grid_shift) + ")} is coarser than 2^{-(j+2)}");
  }
  const ScalingTable& table = evaluator.table();
  const MeanProjection& p = *projection;
  const int len = table.support_length();
  const BandGram gb = BandGram::restricted(table, j, -box_radius, box_radius);
  const BandGram gl = BandGram::whole_line(table, j);

  CovKernels cov;
  cov.level = j;
  cov.box_radius = box_radius;
  cov.table = evaluator.table_ptr();
  cov.projection = projection;
  cov.k_first = std::min(p.k_first, gb.k_first());
  const std::int64_t k_end = std::max(p.k_end(), gb.k_end());
  const auto dim = static_cast<Eigen::Index>(k_end - cov.k_first);
  cov.moment = band_matrix(cov.k_first, dim, len, [&](std::int64_t k, std::int64_t l) { return p.moment_at(k, l); });
  cov.gram_box = band_matrix(cov.k_first, dim, len, [&](std::int64_t k, std::int64_t l) { return gb.at(k, l); });
  cov.gram_line = band_matrix(cov.k_first, dim, len, [&](std::int64_t k, std::int64_t l) { return gl.at(k, l); });
  cov.alpha.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) cov.alpha[i] = p.alpha_at(cov.k_first + i);

  cov.grid_shift = spec.grid_shift;
  const int bits = j + spec.grid_shift;
  cov.weight = std::ldexp(1.0, -bits);
  const std::int64_t g0 = static_cast<std::int64_t>(std::ceil(std::ldexp(-box_radius, bits)));
  const std::int64_t g1 = static_cast<std::int64_t>(std::ceil(std::ldexp(box_radius, bits)));
  for (std::int64_t g = g0; g < g1; ++g) cov.nodes.push_back(std::ldexp(static_cast<double>(g), -bits));

  if (spec.dense) {
    const auto n = static_cast<Eigen::Index>(cov.nodes.size());
    std::vector<Translates> tv;
    tv.reserve(cov.nodes.size());
    for (double t : cov.nodes) tv.push_back(level_values(table, j, t));
    cov.c_matrix.resize(n, n);
    cov.r_matrix.resize(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b <= a; ++b) {
        const auto& ta = tv[static_cast<std::size_t>(a)];
        const auto& tb = tv[static_cast<std::size_t>(b)];
        cov.c_matrix(a, b) = cov.c_matrix(b, a) = bilinear(p, ta, tb, false);
        cov.r_matrix(a, b) = cov.r_matrix(b, a) = bilinear(p, ta, tb, true);
      }
    }
  }
  return cov;
}

std::vector<double> operator_eigenvalues(const CovKernels& cov) {
  const MeanProjection& p = *cov.projection;
  const BandGram gb = BandGram::restricted(*cov.table, cov.level, -cov.box_radius, cov.box_radius);
  const std::int64_t k0 = gb.k_first();
  const auto dim = static_cast<Eigen::Index>(gb.k_end() - k0);
  if (dim <= 0) return {};
  Eigen::MatrixXd g(dim, dim);
  Eigen::MatrixXd c(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index k = 0; k < dim; ++k) {
      g(i, k) = gb.at(k0 + i, k0 + k);
      c(i, k) = p.cov_at(k0 + i, k0 + k);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ge(g);
  if (ge.info() != Eigen::Success) throw Error(ErrorCode::eigen_failure, "Gram eigensolve failed");
  const Eigen::VectorXd root = ge.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd s = ge.eigenvectors() * root.asDiagonal() * ge.eigenvectors().transpose();
  const Eigen::MatrixXd op = std::ldexp(1.0, -cov.level) * (s * c * s);
  const Eigen::VectorXd oe = symmetric_eigenvalues(0.5 * (op + op.transpose()), "operator");
  std::vector<double> ev(oe.data(), oe.data() + dim);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

LemmaReport lemma_integrals(const CovKernels& cov, const DensityModel& density, const LemmaOptions& options) {
  const ScalingTable& table = *cov.table;
  const MeanProjection& p = *cov.projection;
  const int j = cov.level;
  const double m_box = cov.box_radius;
  const MajorantSpec maj = make_majorant(table);
  const double phi_l1 = maj.l1_norm;
  const double phi_l2sq = maj.l2_sq;
  const double two_mj = std::ldexp(1.0, -j);

  LemmaReport rep;
  rep.level = j;
  rep.box_radius = m_box;
  rep.c_sq_box = std::ldexp(trace_mom_gram(cov.moment, cov.gram_box), -j);
  rep.r_sq_box = std::ldexp(trace_cov_gram(cov.moment, cov.gram_box, cov.alpha), -j);
  const double aga_box = cov.alpha.dot(cov.gram_box * cov.alpha);
  rep.c_minus_r_sq_box = std::ldexp(aga_box * aga_box, -j);
  rep.c_sq_line = std::ldexp(trace_mom_gram(cov.moment, cov.gram_line), -j);
  rep.r_sq_line = std::ldexp(trace_cov_gram(cov.moment, cov.gram_line, cov.alpha), -j);
  rep.target_box = density.sq_mass(-m_box, m_box);
  rep.target_line = density.l2_sq();
  rep.limit_deviation = std::abs(rep.c_sq_box - rep.target_box);
  rep.line_deviation_c = std::abs(rep.c_sq_line - rep.target_line);
  rep.line_deviation_r = std::abs(rep.r_sq_line - rep.target_line);
  const auto ops = operator_eigenvalues(cov);
  rep.operator_norm = ops.empty() ? 0.0 : std::max(std::abs(ops.front()), std::abs(ops.back()));

  // Scan x over every step-model cell that can matter for sup_x and E over X.
  const KernelEvaluator ev(cov.table);
  const RestrictedWEvaluator hf(ev, p, m_box);
  const Interval win = density.support_window();
  const int bits = j + table.resolution();
  const double pad = std::ldexp(static_cast<double>(table.support_length()), -j);
  const std::int64_t g_lo = dyadic_floor(std::min(win.lo, -m_box) - pad, bits);
  const std::int64_t g_hi = dyadic_floor(std::max(win.hi, m_box) + pad, bits) + 1;
  double sup_h = -std::numeric_limits<double>::infinity();
  double arg_sup = 0.0;
  std::vector<double> hvals;
  hvals.reserve(static_cast<std::size_t>(g_hi - g_lo));
  StableSum eh;
  StableSum eh2;
  for (std::int64_t g = g_lo; g < g_hi; ++g) {
    const double x = std::ldexp(static_cast<double>(g), -bits);
    const double h = hf.h(x, x);
    hvals.push_back(h);
    if (h > sup_h) {
      sup_h = h;
      arg_sup = x;
    }
    const double w = density.mass(x, std::ldexp(static_cast<double>(g + 1), -bits));
    if (w != 0.0) {
      eh += w * h;
      eh2 += w * h * h;
    }
  }
  const double mean_h = eh.value();
  const double var_h = std::max(0.0, eh2.value() - mean_h * mean_h);
  double centered_sup = 0.0;
  for (double h : hvals) centered_sup = std::max(centered_sup, std::abs(h - mean_h));

  // int_F |Kbar(t,x) Kbar(t,y)| dt on t-cells of width 2^{-(j+q)} for a probe set.
  const int q = std::clamp(options.product_shift, 0, table.resolution());
  const int tbits = j + q;
  const std::int64_t t0 = static_cast<std::int64_t>(std::ceil(std::ldexp(-m_box, tbits)));
  const std::int64_t t1 = static_cast<std::int64_t>(std::ceil(std::ldexp(m_box, tbits)));
  std::vector<double> probes{arg_sup};
  const int np = std::max(options.product_probes - 1, 1);
  for (int i = 0; i < np; ++i) probes.push_back(-m_box + (i + 0.5) * 2.0 * m_box / np);
  std::vector<std::vector<double>> kbar(probes.size());
  std::vector<Translates> tcells;
  for (std::int64_t g = t0; g < t1; ++g) tcells.push_back(level_values(table, j, std::ldexp(static_cast<double>(g), -tbits)));
  for (std::size_t pi = 0; pi < probes.size(); ++pi) {
    const Translates tx = level_values(table, j, probes[pi]);
    kbar[pi].resize(tcells.size());
    for (std::size_t c = 0; c < tcells.size(); ++c) {
      const Translates& tt = tcells[c];
      double s = 0.0;
      for (int m = 0; m < tt.count; ++m) {
        const std::int64_t k = tt.k_first + m;
        const std::int64_t off = k - tx.k_first;
        const double phix = (off >= 0 && off < tx.count) ? tx.value[static_cast<std::size_t>(off)] : 0.0;
        s += tt.value[static_cast<std::size_t>(m)] * (phix - p.alpha_at(k));
      }
      kbar[pi][c] = std::ldexp(s, -j);
    }
  }
  double product_sup = 0.0;
  const double tw = std::ldexp(1.0, -tbits);
  for (std::size_t a = 0; a < probes.size(); ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      double s = 0.0;
      for (std::size_t c = 0; c < tcells.size(); ++c) s += std::abs(kbar[a][c] * kbar[b][c]);
      product_sup = std::max(product_sup, s * tw);
    }
  }

  const double f_sup = density.sup_norm();
  const double f_l2_4 = density.l2_sq() * density.l2_sq();
  const double mass_box = density.mass(-m_box, m_box);
  const double c_phi_f = 2.0 * std::pow(phi_l1, 4) * (f_sup * f_sup + f_l2_4);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  auto row = [&](std::string name, double value, double bound) {
    LemmaRow r;
    r.name = std::move(name);
    r.value = value;
    r.bound = bound;
    r.pass = std::isnan(bound) || value <= bound * (1.0 + 1e-12);
    rep.rows.push_back(r);
    rep.all_pass = rep.all_pass && r.pass;
  };
  row("kbar_sq_integral_sup", sup_h, 4.0 * two_mj * phi_l2sq);
  row("kbar_sq_centered_sup", centered_sup, 8.0 * two_mj * phi_l2sq);
  row("kbar_product_sup", product_sup, 4.0 * two_mj * phi_l2sq);
  row("var_kbar_sq", var_h, 4.0 * two_mj * two_mj * phi_l2sq * phi_l2sq);
  row("var_kbar_sq_box_mass", var_h, 8.0 * two_mj * two_mj * phi_l2sq * phi_l2sq * mass_box);
  row("operator_norm_sq", rep.operator_norm * rep.operator_norm, two_mj * two_mj * c_phi_f);
  row("c_sq_box", rep.c_sq_box, rep.target_box * phi_l1 * phi_l1 * phi_l2sq);
  row("c_minus_r_sq_box", rep.c_minus_r_sq_box, two_mj * std::pow(phi_l1, 4) * f_l2_4);
  row("limit_deviation_box", rep.limit_deviation, nan);
  row("line_deviation_c", rep.line_deviation_c, nan);
  row("line_deviation_r", rep.line_deviation_r, nan);
  row("e_n_sq", rep.r_sq_line, nan);
  for (auto& r : rep.rows) {
    if (r.name == "limit_deviation_box" || r.name == "line_deviation_c") r.exact = r.value <= 1e-12;
  }
  return rep;
}

LemmaRateReport lemma_rate_checks(std::span<const LemmaReport> reports, double holder_alpha) {
  LemmaRateReport out;
  if (reports.empty()) return out;
  std::vector<const LemmaReport*> sorted;
  for (const auto& r : reports) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->level < b->level; });
  for (auto* r : sorted) out.levels.push_back(r->level);

  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->limit_deviation > sorted[i - 1]->limit_deviation + 1e-12) out.deviation_monotone = false;
  }
  auto rate_c = [&](int j) { return std::pow(2.0, -j * holder_alpha); };
  auto rate_r = [&](int j) { return std::pow(2.0, -0.5 * j) + std::pow(2.0, -j * holder_alpha); };
  out.c_rate_constant = sorted.front()->line_deviation_c / rate_c(sorted.front()->level);
  out.r_rate_constant = sorted.front()->line_deviation_r / rate_r(sorted.front()->level);
  for (auto* r : sorted) {
    if (r->line_deviation_c > out.c_rate_constant * rate_c(r->level) * (1.0 + 1e-9) + 1e-12) out.c_rate_holds = false;
    if (r->line_deviation_r > out.r_rate_constant * rate_r(r->level) * (1.0 + 1e-9) + 1e-12) out.r_rate_holds = false;
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (auto* r : sorted) {
    if (r->limit_deviation > 0.0) {
      xs.push_back(r->level);
      ys.push_back(std::log2(r->limit_deviation));
    }
  }
  if (xs.size() >= 2) out.deviation_slope = fit_line(xs, ys).slope;
  return out;
}

SpectrumReport spectrum(const CovKernels& cov) {
  const Eigen::MatrixXd r = dense_r(cov);
  const double h = cov.weight;
  SpectrumReport rep;
  rep.level = cov.level;
  rep.box_radius = cov.box_radius;
  if (r.rows() == 0) return rep;
  // Nodes outside the support give identically zero rows; each contributes an exact zero eigenvalue.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index a = 0; a < r.rows(); ++a) {
    if (r.row(a).cwiseAbs().maxCoeff() > 0.0) keep.push_back(a);
  }
  const auto nk = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd sub(nk, nk);
  for (Eigen::Index a = 0; a < nk; ++a) {
    for (Eigen::Index b = 0; b < nk; ++b) sub(a, b) = h * r(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
  }
  rep.eigenvalues.assign(static_cast<std::size_t>(r.rows() - nk), 0.0);
  if (nk > 0) {
    const Eigen::VectorXd ev = symmetric_eigenvalues(sub, "spectrum");
    rep.eigenvalues.insert(rep.eigenvalues.end(), ev.data(), ev.data() + ev.size());
  }
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), std::greater<>());
  StableSum sl;
  for (double l : rep.eigenvalues) sl += l * l;
  rep.sum_lambda_sq = sl.value();
  StableSum hs;
  for (Eigen::Index a = 0; a < r.rows(); ++a) {
    for (Eigen::Index b = 0; b < r.cols(); ++b) hs += r(a, b) * r(a, b);
  }
  rep.hs_integral = hs.value() * h * h;
  rep.hs_relative_gap =
      rep.hs_integral > 0.0 ? std::abs(rep.sum_lambda_sq - rep.hs_integral) / rep.hs_integral : std::abs(rep.sum_lambda_sq);
  rep.sigma_sq_M = 2.0 * std::ldexp(rep.sum_lambda_sq, cov.level);
  rep.min_eigenvalue = rep.eigenvalues.back();
  rep.psd_warning = rep.min_eigenvalue < -1e-8;
  rep.psd_ok = rep.min_eigenvalue >= -1e-6;
  return rep;
}

std::vector<double> chaos_sample(const SpectrumReport& spec, std::uint64_t seed, std::size_t draws) {
  std::vector<double> out(draws, 0.0);
  const double lead = spec.eigenvalues.empty() ? 0.0 : spec.eigenvalues.front();
  if (!(lead > 0.0) || !(spec.sigma_sq_M > 0.0)) return out;
  std::vector<double> lam;
  for (double l : spec.eigenvalues) {
    if (l >= 1e-10 * lead) lam.push_back(l);
  }
  const double scale = std::sqrt(std::ldexp(1.0, spec.level)) / std::sqrt(spec.sigma_sq_M);
  for (std::size_t i = 0; i < draws; ++i) {
    const CounterStream stream(seed, i);
    double s = 0.0;
    for (std::size_t k = 0; k < lam.size(); ++k) {
      const double z = stream.normal(k);
      s += lam[k] * (z * z - 1.0);
    }
    out[i] = scale * s;
  }
  return out;
}

IjnReport ijn_sum(const DensityModel& density, int support_radius, int level, double box_radius, double x, double u,
                  double z, double w) {
  IjnReport rep;
  rep.level = level;
  rep.box_radius = box_radius;
  const double scale = std::ldexp(1.0, level);
  const double h = 1.0 / scale;
  const auto a2 = static_cast<std::int64_t>(2 * support_radius);
  auto inside = [&](double v) { return v >= -box_radius && v <= box_radius; };
  const auto lo = static_cast<std::int64_t>(std::floor(-box_radius * scale - x - std::max(z, w))) - 1;
  const auto hi = static_cast<std::int64_t>(std::ceil(box_radius * scale - x - std::min(z, w))) + 1;
  StableSum s1;
  StableSum s2;
  StableSum s3;
  for (std::int64_t i = lo; i <= hi; ++i) {
    const double di = static_cast<double>(i);
    if (!inside(h * (z + x + di)) || !inside(h * (w + x + di))) continue;
    const double term = h * density.pdf(h * (x + di)) * density.pdf(h * (x + di - u));
    if (i >= a2) {
      s1 += term;
    } else if (i >= -a2) {
      s2 += term;
    } else {
      s3 += term;
    }
  }
  rep.i1 = s1.value();
  rep.i2 = s2.value();
  rep.i3 = s3.value();
  rep.total = rep.i1 + rep.i2 + rep.i3;
  rep.target = density.sq_mass(-box_radius, box_radius);
  rep.deviation = std::abs(rep.total - rep.target);
  return rep;
}

void write_spectrum_csv(const SpectrumReport& spectrum, std::ostream& out) {
  out << "k,lambda\n";
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
    out << i + 1 << ',' << format_double(spectrum.eigenvalues[i]) << '\n';
  }
}

}  // namespace wise
