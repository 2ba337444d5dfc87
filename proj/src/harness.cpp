#include "wise/harness.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <boost/version.hpp>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "wise/error.hpp"
#include "wise/estimator.hpp"
#include "wise/numeric.hpp"
#include "wise/parallel.hpp"

namespace wise {

using nlohmann::json;

namespace {

// Streams at or above this offset belong to the W_n draws of the chaos
// comparison; the chaos normals use streams 0..draws-1 under the same seed.
constexpr std::uint64_t kWStreamOffset = std::uint64_t{1} << 40;

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::invalid_config, what); }

class Reader {
 public:
  Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) config_error(where_ + " must be a JSON object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      config_error(where_ + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) config_error("unknown config key " + where_ + it.key());
    }
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

WaveletSpec read_wavelet(const json& j, const std::string& where) {
  WaveletSpec w;
  Reader r(j, where);
  std::string family = std::string(family_name(w.family));
  r.get("family", family);
  r.get("order", w.order);
  r.get("resolution", w.resolution);
  r.finish();
  w.family = parse_family(family);
  return w;
}

json wavelet_json(const WaveletSpec& w) {
  return json{{"family", std::string(family_name(w.family))}, {"order", w.order}, {"resolution", w.resolution}};
}

std::string wavelet_label(const WaveletSpec& w) {
  return std::string(family_name(w.family)) + "-" + std::to_string(w.order);
}

json config_json(const ExperimentConfig& c, bool with_runtime) {
  json wl = json::array();
  for (const auto& w : c.lemmas.wavelets) wl.push_back(wavelet_json(w));
  json j{{"schema_version", c.schema_version},
         {"density", c.density},
         {"wavelet", wavelet_json(c.wavelet)},
         {"delta", c.delta},
         {"schedule_multiplier", c.schedule_multiplier},
         {"n_list", c.n_list},
         {"replications", c.replications},
         {"box_radius", c.box_radius},
         {"seed", c.seed},
         {"n", c.n},
         {"level", c.level},
         {"brute", c.brute},
         {"lil",
          {{"n_max", c.lil.n_max},
           {"seeds", c.lil.seeds},
           {"n_start", c.lil.n_start},
           {"ratio", c.lil.ratio},
           {"window_start", c.lil.window_start}}},
         {"lemmas",
          {{"densities", c.lemmas.densities},
           {"wavelets", wl},
           {"levels", c.lemmas.levels},
           {"spectrum_max_level", c.lemmas.spectrum_max_level},
           {"tails", c.lemmas.tails},
           {"tail_replications", c.lemmas.tail_replications}}},
         {"spectrum",
          {{"grid_shift", c.spectrum.grid_shift},
           {"chaos_draws", c.spectrum.chaos_draws},
           {"w_draws", c.spectrum.w_draws}}},
         {"tails",
          {{"taus", c.tails.taus},
           {"n_list", c.tails.n_list},
           {"replications", c.tails.replications},
           {"scaling_levels", c.tails.scaling_levels},
           {"scaling_pairs", c.tails.scaling_pairs}}}};
  if (with_runtime) {
    j["out_dir"] = c.out_dir;
    j["threads"] = c.threads;
  }
  return j;
}

bool strictly_increasing(const std::vector<std::size_t>& v) {
  return std::adjacent_find(v.begin(), v.end(), [](auto a, auto b) { return a >= b; }) == v.end();
}

double be_rate(double n, double delta, double alpha) {
  return std::max(std::pow(n, -3.0 * delta / 16.0), std::pow(n, -alpha * delta) * std::sqrt(std::log(n)));
}

}  // namespace

void validate_config(const ExperimentConfig& c) {
  if (c.schema_version != kConfigSchemaVersion) {
    config_error("schema_version " + std::to_string(c.schema_version) + " is not supported (expected " +
                 std::to_string(kConfigSchemaVersion) + ")");
  }
  if (!(c.delta > 0.0 && c.delta < 1.0 / 3.0)) config_error("delta must lie in (0, 1/3)");
  if (!(c.schedule_multiplier > 0.0)) config_error("schedule_multiplier must be positive");
  if (c.replications < 1) config_error("replications must be >= 1");
  if (!strictly_increasing(c.n_list)) config_error("n_list must be strictly increasing");
  if (!c.n_list.empty() && c.n_list.front() < 2) config_error("n_list entries must be >= 2");
  if (!(c.box_radius > 0.0)) config_error("box_radius must be positive");
  if (c.n < 2) config_error("n must be >= 2");
  if (c.level < -1) config_error("level must be >= 0, or -1 for the schedule level");
  if (c.wavelet.resolution < 0) config_error("wavelet resolution must be >= 0");
  if (c.threads < 1) config_error("threads must be >= 1");
  if (!(c.lil.ratio > 1.0)) config_error("lil.ratio must exceed 1");
  if (c.lil.n_start < 3) config_error("lil.n_start must be >= 3");
  if (c.lil.seeds.empty()) config_error("lil.seeds must not be empty");
  if (!strictly_increasing(c.tails.n_list)) config_error("tails.n_list must be strictly increasing");
  if (c.tails.replications < 1 || c.lemmas.tail_replications < 1) config_error("tail replications must be >= 1");
  if (c.spectrum.chaos_draws < 1 || c.spectrum.w_draws < 1) config_error("spectrum draws must be >= 1");
  for (double t : c.tails.taus) {
    if (!(t > 0.0)) config_error("tails.taus must be positive");
  }
}

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  Reader r(root, "");
  r.get("schema_version", c.schema_version);
  if (c.schema_version != kConfigSchemaVersion) validate_config(c);
  r.get("density", c.density);
  if (const json* w = r.child("wavelet")) c.wavelet = read_wavelet(*w, "wavelet.");
  r.get("delta", c.delta);
  r.get("schedule_multiplier", c.schedule_multiplier);
  r.get("n_list", c.n_list);
  r.get("replications", c.replications);
  r.get("box_radius", c.box_radius);
  r.get("seed", c.seed);
  r.get("n", c.n);
  r.get("level", c.level);
  r.get("out_dir", c.out_dir);
  r.get("brute", c.brute);
  r.get("threads", c.threads);
  if (const json* l = r.child("lil")) {
    Reader lr(*l, "lil.");
    lr.get("n_max", c.lil.n_max);
    lr.get("seeds", c.lil.seeds);
    lr.get("n_start", c.lil.n_start);
    lr.get("ratio", c.lil.ratio);
    lr.get("window_start", c.lil.window_start);
    lr.finish();
  }
  if (const json* l = r.child("lemmas")) {
    Reader lr(*l, "lemmas.");
    lr.get("densities", c.lemmas.densities);
    if (const json* ws = lr.child("wavelets")) {
      if (!ws->is_array()) config_error("lemmas.wavelets must be an array");
      c.lemmas.wavelets.clear();
      for (const auto& w : *ws) c.lemmas.wavelets.push_back(read_wavelet(w, "lemmas.wavelets[]."));
    }
    lr.get("levels", c.lemmas.levels);
    lr.get("spectrum_max_level", c.lemmas.spectrum_max_level);
    lr.get("tails", c.lemmas.tails);
    lr.get("tail_replications", c.lemmas.tail_replications);
    lr.finish();
  }
  if (const json* s = r.child("spectrum")) {
    Reader sr(*s, "spectrum.");
    sr.get("grid_shift", c.spectrum.grid_shift);
    sr.get("chaos_draws", c.spectrum.chaos_draws);
    sr.get("w_draws", c.spectrum.w_draws);
    sr.finish();
  }
  if (const json* t = r.child("tails")) {
    Reader tr(*t, "tails.");
    tr.get("taus", c.tails.taus);
    tr.get("n_list", c.tails.n_list);
    tr.get("replications", c.tails.replications);
    tr.get("scaling_levels", c.tails.scaling_levels);
    tr.get("scaling_pairs", c.tails.scaling_pairs);
    tr.finish();
  }
  r.finish();
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& config) { return config_json(config, true).dump(2); }

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = config_json(config, false).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

std::shared_ptr<const ScalingTable> build_table(const WaveletSpec& spec) {
  return std::make_shared<const ScalingTable>(
      cascade(make_filter(spec.family, spec.order), CascadeOptions{spec.resolution}));
}

int effective_level(const ExperimentConfig& config, std::size_t n) {
  if (config.level >= 0) return config.level;
  return make_schedule(config.delta, config.schedule_multiplier).level(static_cast<double>(n));
}

CltResult run_clt_experiment(const ExperimentConfig& config) {
  validate_config(config);
  const DensityModel density = parse_density(config.density);
  const KernelEvaluator ev(build_table(config.wavelet));
  const BandwidthSchedule schedule = make_schedule(config.delta, config.schedule_multiplier);
  CltResult out;
  for (std::size_t n : config.n_list) {
    CltRow row;
    row.n = n;
    row.replications = config.replications;
    row.be_bound = be_rate(static_cast<double>(n), config.delta, density.holder_alpha());
    std::vector<double> t(config.replications, 0.0);
    try {
      const int j = config.level >= 0 ? config.level : schedule.level(static_cast<double>(n));
      row.level = j;
      const MeanProjection proj = projection_mean(density, ev, j);
      const bool brute = config.brute && n <= 4096;
      std::vector<double> disc(config.replications, 0.0);
      parallel_for(config.replications, config.threads, [&](std::size_t r) {
        const Sample s = sample(density, n, config.seed, r);
        const IseBreakdown b = jbar_statistic(s, ev, density, j, proj);
        t[r] = b.t_n;
        if (brute) {
          const PairStatistics p = pair_statistics_brute(s, ev, proj);
          disc[r] = std::abs(p.w_n - b.w_n);
        }
      });
      row.ks_distance = ks_distance_normal(t);
      const MeanStat ms = mean_stat(t);
      row.mean_t = ms.mean;
      row.var_t = ms.variance;
      if (brute) row.brute_discrepancy = *std::max_element(disc.begin(), disc.end());
    } catch (const Error& e) {
      row.error = e.what();
      out.ok = false;
    }
    out.rows.push_back(row);
    out.t_values.push_back(std::move(t));
  }
  return out;
}

void write_clt_csv(const CltResult& result, std::ostream& out) {
  out << "n,j,ks_distance,be_bound,replications,mean_t,var_t,error\n";
  for (const auto& r : result.rows) {
    out << r.n << ',' << r.level << ',' << format_double(r.ks_distance) << ',' << format_double(r.be_bound) << ','
        << r.replications << ',' << format_double(r.mean_t) << ',' << format_double(r.var_t) << ',' << r.error << '\n';
  }
}

void write_clt_replications_csv(const CltResult& result, std::ostream& out) {
  out << "n,j,replication,t_n\n";
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    if (!result.rows[i].error.empty()) continue;
    for (std::size_t r = 0; r < result.t_values[i].size(); ++r) {
      out << result.rows[i].n << ',' << result.rows[i].level << ',' << r << ',' << format_double(result.t_values[i][r])
          << '\n';
    }
  }
}

std::vector<LilTrajectory> run_lil_trajectory(const ExperimentConfig& config) {
  validate_config(config);
  const LilSettings& ls = config.lil;
  if (ls.n_max < 100) {
    throw Error(ErrorCode::trajectory_too_short, "n_max " + std::to_string(ls.n_max) + " is below 100");
  }
  const DensityModel density = parse_density(config.density);
  const KernelEvaluator ev(build_table(config.wavelet));
  const BandwidthSchedule schedule = make_schedule(config.delta, config.schedule_multiplier);

  std::vector<std::size_t> grid;
  for (double n = static_cast<double>(std::min(ls.n_start, ls.n_max)); n < static_cast<double>(ls.n_max);
       n = std::max(n + 1.0, std::ceil(n * ls.ratio))) {
    grid.push_back(static_cast<std::size_t>(n));
  }
  grid.push_back(ls.n_max);

  std::map<int, MeanProjection> projections;
  auto projection_for = [&](int j) -> const MeanProjection& {
    auto it = projections.find(j);
    if (it == projections.end()) it = projections.emplace(j, projection_mean(density, ev, j)).first;
    return it->second;
  };

  std::vector<LilTrajectory> out(ls.seeds.size());
  for (std::size_t si = 0; si < ls.seeds.size(); ++si) {
    LilTrajectory& tr = out[si];
    tr.seed = ls.seeds[si];
    const Sample s = sample(density, ls.n_max, tr.seed, 0);
    std::unique_ptr<CoefficientAccumulator> acc;
    std::size_t consumed = 0;
    int prev_level = -1;
    std::int64_t prev_block = -1;
    double run_max = -std::numeric_limits<double>::infinity();
    double run_min = std::numeric_limits<double>::infinity();
    for (std::size_t n : grid) {
      const std::int64_t block = schedule.block(static_cast<double>(n));
      const int j = schedule.level(static_cast<double>(n));
      if (!acc || acc->level() != j) {
        // j_n applies to the whole sample, so a level change re-accumulates from scratch.
        acc = std::make_unique<CoefficientAccumulator>(ev.table_ptr(), j);
        acc->add(std::span<const double>(s.values.data(), consumed));
      }
      acc->add(std::span<const double>(s.values.data() + consumed, n - consumed));
      consumed = n;
      const IseBreakdown b = jbar_statistic(*acc, density, projection_for(j));
      LilPoint p;
      p.n = n;
      p.level = j;
      p.block = block;
      p.t_n = b.t_n;
      const double norm = std::sqrt(2.0 * std::log(std::log(static_cast<double>(n))));
      p.l_plus = b.t_n / norm;
      p.l_minus = -p.l_plus;
      run_max = std::max(run_max, p.l_plus);
      run_min = std::min(run_min, p.l_plus);
      p.running_max = run_max;
      p.running_min = run_min;
      if (prev_level >= 0 && j != prev_level) {
        ++tr.level_changes;
        if (block == prev_block) tr.blocks_consistent = false;
      }
      if (j != schedule.level_for_block(block)) tr.blocks_consistent = false;
      prev_level = j;
      prev_block = block;
      if (n >= ls.window_start) tr.window_max_abs = std::max(tr.window_max_abs, std::abs(p.l_plus));
      tr.points.push_back(p);
    }
  }
  return out;
}

void write_lil_csv(const LilTrajectory& t, std::ostream& out) {
  out << "n,j,block,t_n,l_plus,l_minus,running_max,running_min\n";
  for (const auto& p : t.points) {
    out << p.n << ',' << p.level << ',' << p.block << ',' << format_double(p.t_n) << ',' << format_double(p.l_plus)
        << ',' << format_double(p.l_minus) << ',' << format_double(p.running_max) << ','
        << format_double(p.running_min) << '\n';
  }
}

LemmaSuiteReport run_lemma_suite(const ExperimentConfig& config) {
  validate_config(config);
  LemmaSuiteReport rep;
  const LemmaSettings& ls = config.lemmas;
  const double m_box = config.box_radius;
  for (const WaveletSpec& ws : ls.wavelets) {
    const std::string wname = wavelet_label(ws);
    std::shared_ptr<const ScalingTable> table;
    try {
      table = build_table(ws);
    } catch (const Error& e) {
      LemmaCell cell;
      cell.wavelet = wname;
      cell.pass = false;
      cell.error = e.what();
      rep.cells.push_back(cell);
      rep.all_pass = false;
      continue;
    }
    const KernelEvaluator ev(table);
    WaveletChecks wc;
    wc.wavelet = wname;
    wc.basis = basis_diagnostics(*table);
    KernelCheckSpec ks;
    ks.quadruple_brute_level = config.brute ? 6 : -1;
    wc.kernel = kernel_identity_checks(ev, ks);
    wc.quadruple_exact = std::abs(wc.kernel.quadruple_fast - 1.0) <= 1e-12;
    wc.pass = wc.basis.partition_residual <= 1e-9 && wc.basis.two_scale_residual <= 1e-10 &&
              wc.basis.orthonormality_residual <= 5e-3 && wc.kernel.symmetry_residual <= 1e-12 &&
              wc.kernel.periodicity_residual <= 1e-12 && wc.kernel.majorant_violations == 0 &&
              std::abs(wc.kernel.quadruple_fast - 1.0) <= 5e-3;
    rep.all_pass = rep.all_pass && wc.pass;
    rep.wavelets.push_back(wc);

    for (const std::string& dname : ls.densities) {
      DensityChecks dc;
      dc.wavelet = wname;
      dc.density = dname;
      std::vector<LemmaReport> reports;
      try {
        const DensityModel density = parse_density(dname);
        for (int j : ls.levels) {
          LemmaCell cell;
          cell.wavelet = wname;
          cell.density = density.name();
          cell.level = j;
          try {
            auto proj = std::make_shared<const MeanProjection>(projection_mean(density, ev, j));
            CovGridSpec gs;
            gs.grid_shift = config.spectrum.grid_shift;
            gs.dense = j <= ls.spectrum_max_level;
            const CovKernels cov = cov_kernels(proj, ev, m_box, gs);
            cell.lemmas = lemma_integrals(cov, density, {});
            cell.pass = cell.lemmas->all_pass;
            reports.push_back(*cell.lemmas);
            if (gs.dense) {
              cell.spectrum = spectrum(cov);
              cell.pass = cell.pass && cell.spectrum->hs_relative_gap <= 1e-6 && cell.spectrum->psd_ok;
            }
            cell.ijn = ijn_sum(density, table->support_length(), j, m_box, 0.25, 0.5, 0.5, -0.5);
            cell.ijn_middle_bound = 4.0 * table->support_length() * std::ldexp(1.0, -j) * density.sup_norm() *
                                    density.sup_norm();
            cell.pass = cell.pass && cell.ijn->i2 <= cell.ijn_middle_bound * (1.0 + 1e-12);
            if (config.brute) {
              const Sample s = sample(density, 256, config.seed, static_cast<std::uint64_t>(j));
              cell.w_fast = wn_restricted(s, ev, *proj, m_box);
              cell.w_brute = wn_restricted_brute(s, ev, *proj, m_box);
              const double scale = std::max(1.0, std::abs(cell.w_brute->w_n));
              cell.pass = cell.pass && std::abs(cell.w_fast->w_n - cell.w_brute->w_n) <= 1e-8 * scale;
            }
          } catch (const Error& e) {
            cell.pass = false;
            cell.error = e.what();
          }
          rep.all_pass = rep.all_pass && cell.pass;
          rep.cells.push_back(std::move(cell));
        }
        if (!reports.empty()) {
          dc.rates = lemma_rate_checks(reports, density.holder_alpha());
          dc.pass = dc.rates.deviation_monotone && dc.rates.c_rate_holds && dc.rates.r_rate_holds;
        }
        if (ls.tails) {
          TailComparisonSpec ts;
          ts.n_list = config.tails.n_list;
          ts.replications = ls.tail_replications;
          ts.taus = config.tails.taus;
          ts.box_radius = m_box;
          ts.delta = config.delta;
          ts.seed = config.seed;
          ts.threads = config.threads;
          dc.tails = tail_comparison(density, ev, ts);
          dc.pass = dc.pass && dc.tails->all_below;
        }
      } catch (const Error& e) {
        dc.pass = false;
        dc.error = e.what();
      }
      rep.all_pass = rep.all_pass && dc.pass;
      rep.series.push_back(std::move(dc));
    }
  }
  return rep;
}

ChaosComparison run_chaos_comparison(const ExperimentConfig& config) {
  validate_config(config);
  const DensityModel density = parse_density(config.density);
  const KernelEvaluator ev(build_table(config.wavelet));
  ChaosComparison out;
  out.n = config.n;
  out.level = effective_level(config, config.n);
  auto proj = std::make_shared<const MeanProjection>(projection_mean(density, ev, out.level));
  CovGridSpec gs;
  gs.grid_shift = config.spectrum.grid_shift;
  const CovKernels cov = cov_kernels(proj, ev, config.box_radius, gs);
  out.spectrum = spectrum(cov);
  out.chaos = chaos_sample(out.spectrum, config.seed, config.spectrum.chaos_draws);
  const RestrictedWEvaluator wf(ev, *proj, config.box_radius);
  const double scale = std::pow(2.0, 1.5 * out.level) /
                       (static_cast<double>(config.n) * std::sqrt(out.spectrum.sigma_sq_M));
  out.scaled_w.assign(config.spectrum.w_draws, 0.0);
  parallel_for(config.spectrum.w_draws, config.threads, [&](std::size_t r) {
    const Sample s = sample(density, config.n, config.seed, kWStreamOffset + r);
    out.scaled_w[r] = scale * wf(s.values).w_n;
  });
  out.ks_distance = ks_distance_two_sample(out.chaos, out.scaled_w);
  return out;
}

SnCheck run_sn_check(const ExperimentConfig& config, std::size_t n, int level) {
  validate_config(config);
  const DensityModel density = parse_density(config.density);
  const KernelEvaluator ev(build_table(config.wavelet));
  const MeanProjection proj = projection_mean(density, ev, level);
  SnCheck out;
  out.level = level;
  out.n = n;
  out.replications = config.replications;
  const double nd = static_cast<double>(n);
  out.s_n_sq_formula = nd * (nd - 1.0) / 2.0 * std::pow(2.0, -3.0 * level) * e_n_squared(proj, ev.table());
  std::vector<double> sq(config.replications);
  std::vector<double> direct(config.replications);
  parallel_for(config.replications, config.threads, [&](std::size_t r) {
    const Sample s = sample(density, n, config.seed, r);
    const MartingaleDecomposition md = martingale_decompose(s, ev, density, level, proj);
    sq[r] = md.u_nn * md.u_nn;
    direct[r] = md.s_n_sq_direct;
  });
  const MeanStat ms = mean_stat(sq);
  out.u_nn_sq_mean = ms.mean;
  out.u_nn_sq_se = ms.std_error;
  out.s_n_sq_direct = direct.front();
  out.relative_gap = std::abs(out.u_nn_sq_mean - out.s_n_sq_formula) / out.s_n_sq_formula;
  return out;
}

std::string manifest_json(const ExperimentConfig& config, std::string_view command) {
  json m{{"tool", "wise"},
         {"tool_version", "1.0.0"},
         {"command", std::string(command)},
         {"schema_version", config.schema_version},
         {"config_hash", config_hash(config)},
         {"seed", config.seed},
         {"config", config_json(config, false)},
         {"libraries",
          {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                         std::to_string(EIGEN_MINOR_VERSION)},
           {"boost", BOOST_LIB_VERSION},
           {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                 std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                 std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
  return m.dump(2) + "\n";
}

}  // namespace wise
