#include "wise/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "wise/error.hpp"
#include "wise/estimator.hpp"
#include "wise/harness.hpp"
#include "wise/serialize.hpp"

namespace wise {

namespace {

namespace fs = std::filesystem;

constexpr const char* kExitHelp =
    "Exit codes:\n"
    "  0  success (all checks of the subcommand passed)\n"
    "  1  verification failed (a check or experiment row failed)\n"
    "  2  usage or configuration error\n"
    "  3  numerical error (cascade, eigensolve, window, level, ...)\n"
    "  4  I/O error\n";

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
  bool brute = false;
};

class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::io_failure, "cannot create " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) const {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_failure, "cannot open " + p.string() + " for writing");
    body(out);
    out.flush();
    if (!out) throw Error(ErrorCode::io_failure, "write to " + p.string() + " failed");
  }

  void text(const std::string& name, const std::string& content) const {
    write(name, [&](std::ostream& o) { o << content; });
  }

  void json(const std::string& name, const nlohmann::json& j) const { text(name, j.dump(2) + "\n"); }

 private:
  fs::path dir_;
};

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : load_config(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  if (c.out_dir) cfg.out_dir = *c.out_dir;
  if (c.threads) cfg.threads = *c.threads;
  if (c.brute) cfg.brute = true;
  validate_config(cfg);
  return cfg;
}

int cmd_estimate(const ExperimentConfig& cfg, const Output& out) {
  const DensityModel density = parse_density(cfg.density);
  const KernelEvaluator ev(build_table(cfg.wavelet));
  const int j = effective_level(cfg, cfg.n);
  const Sample s = sample(density, cfg.n, cfg.seed, 0);
  EstimateOptions opts;
  opts.kernel_form = cfg.brute;
  const DensityEstimate est = estimate(s, ev, j, opts);
  const MeanProjection proj = projection_mean(density, ev, j);
  const IseBreakdown b = jbar_statistic(s, ev, density, j, proj);
  out.write("estimate.csv", [&](std::ostream& o) { write_estimate_csv(est, o); });
  out.write("coefficients.csv", [&](std::ostream& o) { write_coefficients_csv(est, o); });
  nlohmann::json j_out = to_json(b);
  j_out["mass"] = estimate_mass(est, ev.table());
  if (cfg.brute) j_out["form_discrepancy"] = est.form_discrepancy;
  out.json("estimate.json", j_out);
  std::cout << "estimate: n=" << cfg.n << " j=" << j << " ISE=" << b.i_n << " t_n=" << b.t_n << "\n";
  return kExitOk;
}

int cmd_clt(const ExperimentConfig& cfg, const Output& out) {
  const CltResult r = run_clt_experiment(cfg);
  out.write("clt.csv", [&](std::ostream& o) { write_clt_csv(r, o); });
  out.write("clt_replications.csv", [&](std::ostream& o) { write_clt_replications_csv(r, o); });
  out.json("clt.json", to_json(r));
  for (const auto& row : r.rows) {
    std::cout << "clt: n=" << row.n << " j=" << row.level << " ks=" << row.ks_distance << " rate=" << row.be_bound
              << (row.error.empty() ? "" : " error=" + row.error) << "\n";
  }
  return r.ok ? kExitOk : kExitVerificationFailed;
}

int cmd_lil(const ExperimentConfig& cfg, const Output& out) {
  const auto trajectories = run_lil_trajectory(cfg);
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& t : trajectories) {
    out.write("lil_seed" + std::to_string(t.seed) + ".csv", [&](std::ostream& o) { write_lil_csv(t, o); });
    summary.push_back(to_json(t));
    std::cout << "lil: seed=" << t.seed << " max|L| over window=" << t.window_max_abs
              << " blocks_consistent=" << t.blocks_consistent << "\n";
  }
  out.json("lil.json", summary);
  return kExitOk;
}

int cmd_lemmas(const ExperimentConfig& cfg, const Output& out) {
  const LemmaSuiteReport r = run_lemma_suite(cfg);
  out.json("lemmas.json", to_json(r));
  std::size_t failed = 0;
  for (const auto& c : r.cells) failed += c.pass ? 0 : 1;
  std::cout << "lemmas: " << r.cells.size() << " cells, " << failed << " failed, all_pass=" << r.all_pass << "\n";
  return r.all_pass ? kExitOk : kExitVerificationFailed;
}

int cmd_tails(const ExperimentConfig& cfg, const Output& out) {
  const DensityModel density = parse_density(cfg.density);
  const KernelEvaluator ev(build_table(cfg.wavelet));
  TailComparisonSpec ts;
  ts.n_list = cfg.tails.n_list;
  ts.replications = cfg.tails.replications;
  ts.taus = cfg.tails.taus;
  ts.box_radius = cfg.box_radius;
  ts.delta = cfg.delta;
  ts.seed = cfg.seed;
  ts.threads = cfg.threads;
  const TailComparison tc = tail_comparison(density, ev, ts);
  const ScalingReport sr =
      moment_scaling_probe(density, ev, cfg.tails.scaling_levels, cfg.tails.scaling_pairs, cfg.seed, cfg.threads);
  out.write("tails.csv", [&](std::ostream& o) { write_tail_csv(tc, o); });
  out.write("scaling.csv", [&](std::ostream& o) { write_scaling_csv(sr, o); });
  out.json("tails.json", {{"tails", to_json(tc)}, {"scaling", to_json(sr)}});
  std::cout << "tails: all_below=" << tc.all_below << " L=" << tc.l_const << " kappa0=" << tc.kappa0
            << " slope(E H^4)=" << sr.slope_h4 << " slope(E G^2)=" << sr.slope_g2 << "\n";
  return tc.all_below ? kExitOk : kExitVerificationFailed;
}

int cmd_spectrum(const ExperimentConfig& cfg, const Output& out) {
  const ChaosComparison c = run_chaos_comparison(cfg);
  out.write("spectrum.csv", [&](std::ostream& o) { write_spectrum_csv(c.spectrum, o); });
  out.json("spectrum.json", to_json(c));
  std::cout << "spectrum: j=" << c.level << " sigma^2(M)=" << c.spectrum.sigma_sq_M
            << " hs_gap=" << c.spectrum.hs_relative_gap << " chaos_ks=" << c.ks_distance << "\n";
  return (c.spectrum.hs_relative_gap <= 1e-6 && c.spectrum.psd_ok) ? kExitOk : kExitVerificationFailed;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_config:
      return kExitUsage;
    case ErrorCode::io_failure:
      return kExitIo;
    default:
      return kExitNumeric;
  }
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Linear wavelet density estimator laboratory"};
  app.footer(kExitHelp);
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "JSON config file (schema_version 1)")->check(CLI::ExistingFile);
  app.add_option("--seed", common.seed, "override the config seed");
  app.add_option("--out-dir", common.out_dir, "output directory (created if missing)");
  app.add_option("--threads", common.threads, "worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
  app.add_flag("--brute", common.brute, "also run the brute-force oracle paths");

  using Handler = int (*)(const ExperimentConfig&, const Output&);
  const std::vector<std::tuple<std::string, std::string, Handler>> commands{
      {"estimate", "fit the estimator to one sample; writes estimate.csv, coefficients.csv", cmd_estimate},
      {"clt", "replicated t_n experiment with KS distance to N(0,1)", cmd_clt},
      {"lil", "law-of-iterated-logarithm trajectory diagnostic", cmd_lil},
      {"lemmas", "basis, kernel, covariance-integral and spectrum checks over the config matrix", cmd_lemmas},
      {"tails", "tail-bound comparison and moment-scaling probe", cmd_tails},
      {"spectrum", "covariance spectrum, sigma^2(M) and chaos comparison", cmd_spectrum},
  };
  Handler chosen = nullptr;
  std::string chosen_name;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&chosen, &chosen_name, name = name, fn = fn] {
      chosen = fn;
      chosen_name = name;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const ExperimentConfig cfg = resolve(common);
    const Output out(cfg.out_dir);
    const int code = chosen(cfg, out);
    out.text("manifest.json", manifest_json(cfg, chosen_name));
    return code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return kExitNumeric;
  }
}

}  // namespace wise
