#include "wise/serialize.hpp"

#include <cmath>

namespace wise {

using nlohmann::json;

namespace {

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json to_json(const BasisReport& r) {
  return {{"sup_norm", num(r.sup_norm)},
          {"tv_norm", num(r.tv_norm)},
          {"theta_sup", num(r.theta_sup)},
          {"l2_norm_sq", num(r.l2_norm_sq)},
          {"orthonormality_residual", num(r.orthonormality_residual)},
          {"partition_residual", num(r.partition_residual)},
          {"two_scale_residual", num(r.two_scale_residual)}};
}

json to_json(const KernelIdentityReport& r) {
  json j{{"probe_points", r.probe_points},
         {"reproducing_residual", num(r.reproducing_residual)},
         {"periodicity_residual", num(r.periodicity_residual)},
         {"symmetry_residual", num(r.symmetry_residual)},
         {"majorant_pairs", r.majorant_pairs},
         {"majorant_violations", r.majorant_violations},
         {"quadruple_fast", num(r.quadruple_fast)},
         {"quadruple_fast_level", r.quadruple_fast_level}};
  if (r.brute_evaluated) {
    j["quadruple_brute"] = num(r.quadruple_brute);
    j["quadruple_brute_level"] = r.quadruple_brute_level;
  }
  return j;
}

json to_json(const LemmaReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"name", row.name},
                    {"value", num(row.value)},
                    {"bound", num(row.bound)},
                    {"pass", row.pass},
                    {"exact", row.exact}});
  }
  return {{"level", r.level},
          {"box_radius", r.box_radius},
          {"c_sq_box", num(r.c_sq_box)},
          {"r_sq_box", num(r.r_sq_box)},
          {"c_minus_r_sq_box", num(r.c_minus_r_sq_box)},
          {"c_sq_line", num(r.c_sq_line)},
          {"r_sq_line", num(r.r_sq_line)},
          {"operator_norm", num(r.operator_norm)},
          {"target_box", num(r.target_box)},
          {"target_line", num(r.target_line)},
          {"limit_deviation", num(r.limit_deviation)},
          {"line_deviation_c", num(r.line_deviation_c)},
          {"line_deviation_r", num(r.line_deviation_r)},
          {"rows", rows},
          {"all_pass", r.all_pass}};
}

json to_json(const LemmaRateReport& r) {
  return {{"levels", r.levels},
          {"deviation_monotone", r.deviation_monotone},
          {"c_rate_constant", num(r.c_rate_constant)},
          {"r_rate_constant", num(r.r_rate_constant)},
          {"c_rate_holds", r.c_rate_holds},
          {"r_rate_holds", r.r_rate_holds},
          {"deviation_slope", num(r.deviation_slope)}};
}

json to_json(const SpectrumReport& r, bool with_eigenvalues) {
  json j{{"level", r.level},
         {"box_radius", r.box_radius},
         {"size", r.eigenvalues.size()},
         {"largest", r.eigenvalues.empty() ? json(nullptr) : num(r.eigenvalues.front())},
         {"sum_lambda_sq", num(r.sum_lambda_sq)},
         {"hs_integral", num(r.hs_integral)},
         {"hs_relative_gap", num(r.hs_relative_gap)},
         {"sigma_sq_M", num(r.sigma_sq_M)},
         {"min_eigenvalue", num(r.min_eigenvalue)},
         {"psd_warning", r.psd_warning},
         {"psd_ok", r.psd_ok}};
  if (with_eigenvalues) j["eigenvalues"] = r.eigenvalues;
  return j;
}

json to_json(const IjnReport& r) {
  return {{"level", r.level},        {"box_radius", r.box_radius}, {"i1", num(r.i1)},
          {"i2", num(r.i2)},         {"i3", num(r.i3)},            {"total", num(r.total)},
          {"target", num(r.target)}, {"deviation", num(r.deviation)}};
}

json to_json(const IseBreakdown& r) {
  return {{"level", r.level},
          {"n", r.n},
          {"i_n", num(r.i_n)},
          {"expected_i_n", num(r.expected_i_n)},
          {"j_n", num(r.j_n_stat)},
          {"jbar", num(r.jbar)},
          {"w_n", num(r.w_n)},
          {"u_n", num(r.u_n)},
          {"l_n", num(r.l_n)},
          {"t_n", num(r.t_n)}};
}

json to_json(const TailComparison& r) {
  json rows = json::array();
  for (const auto& t : r.rows) {
    rows.push_back({{"kind", t.kind},
                    {"tau", t.tau},
                    {"bound", num(t.bound)},
                    {"empirical_freq", t.empirical_freq},
                    {"n", t.n},
                    {"j", t.level},
                    {"below", t.below}});
  }
  return {{"l_const", num(r.l_const)}, {"kappa0", num(r.kappa0)}, {"all_below", r.all_below}, {"rows", rows}};
}

json to_json(const ScalingReport& r) {
  return {{"levels", r.levels},     {"e_h4", r.e_h4},         {"e_h4_se", r.e_h4_se},
          {"e_g2", r.e_g2},         {"e_g2_se", r.e_g2_se},   {"slope_h4", num(r.slope_h4)},
          {"slope_h4_se", num(r.slope_h4_se)}, {"slope_g2", num(r.slope_g2)}, {"slope_g2_se", num(r.slope_g2_se)}};
}

json to_json(const CltResult& r) {
  json rows = json::array();
  for (const auto& c : r.rows) {
    json j{{"n", c.n},
           {"j", c.level},
           {"ks_distance", num(c.ks_distance)},
           {"be_bound", num(c.be_bound)},
           {"replications", c.replications},
           {"mean_t", num(c.mean_t)},
           {"var_t", num(c.var_t)}};
    if (c.brute_discrepancy >= 0.0) j["brute_discrepancy"] = num(c.brute_discrepancy);
    if (!c.error.empty()) j["error"] = c.error;
    rows.push_back(j);
  }
  return {{"rows", rows}, {"ok", r.ok}};
}

json to_json(const LilTrajectory& r) {
  return {{"seed", r.seed},
          {"points", r.points.size()},
          {"n_max", r.points.empty() ? 0 : r.points.back().n},
          {"window_max_abs", num(r.window_max_abs)},
          {"blocks_consistent", r.blocks_consistent},
          {"level_changes", r.level_changes},
          {"final_running_max", r.points.empty() ? json(nullptr) : num(r.points.back().running_max)},
          {"final_running_min", r.points.empty() ? json(nullptr) : num(r.points.back().running_min)},
          {"note", "diagnostic only; the almost-sure limit is not verified by a finite run"}};
}

json to_json(const LemmaSuiteReport& r) {
  json wl = json::array();
  for (const auto& w : r.wavelets) {
    wl.push_back({{"wavelet", w.wavelet},
                  {"basis", to_json(w.basis)},
                  {"kernel", to_json(w.kernel)},
                  {"quadruple_exact", w.quadruple_exact},
                  {"pass", w.pass}});
  }
  json cells = json::array();
  for (const auto& c : r.cells) {
    json j{{"wavelet", c.wavelet}, {"density", c.density}, {"level", c.level}, {"pass", c.pass}};
    if (c.lemmas) j["lemmas"] = to_json(*c.lemmas);
    if (c.spectrum) j["spectrum"] = to_json(*c.spectrum, false);
    if (c.ijn) {
      j["ijn"] = to_json(*c.ijn);
      j["ijn"]["middle_bound"] = num(c.ijn_middle_bound);
    }
    if (c.w_fast && c.w_brute) {
      j["w_fast"] = num(c.w_fast->w_n);
      j["w_brute"] = num(c.w_brute->w_n);
    }
    if (!c.error.empty()) j["error"] = c.error;
    cells.push_back(j);
  }
  json series = json::array();
  for (const auto& s : r.series) {
    json j{{"wavelet", s.wavelet}, {"density", s.density}, {"rates", to_json(s.rates)}, {"pass", s.pass}};
    if (s.tails) j["tails"] = to_json(*s.tails);
    if (!s.error.empty()) j["error"] = s.error;
    series.push_back(j);
  }
  return {{"wavelets", wl}, {"cells", cells}, {"series", series}, {"all_pass", r.all_pass}};
}

json to_json(const ChaosComparison& r) {
  return {{"level", r.level},
          {"n", r.n},
          {"spectrum", to_json(r.spectrum, false)},
          {"chaos_draws", r.chaos.size()},
          {"w_draws", r.scaled_w.size()},
          {"ks_distance", num(r.ks_distance)}};
}

json to_json(const SnCheck& r) {
  return {{"level", r.level},
          {"n", r.n},
          {"replications", r.replications},
          {"s_n_sq_formula", num(r.s_n_sq_formula)},
          {"s_n_sq_direct", num(r.s_n_sq_direct)},
          {"u_nn_sq_mean", num(r.u_nn_sq_mean)},
          {"u_nn_sq_se", num(r.u_nn_sq_se)},
          {"relative_gap", num(r.relative_gap)}};
}

}  // namespace wise
