#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wise/density.hpp"
#include "wise/ise.hpp"
#include "wise/projection_kernel.hpp"
#include "wise/tail_bounds.hpp"
#include "wise/variance_oracle.hpp"
#include "wise/wavelet_basis.hpp"

namespace wise {

inline constexpr int kConfigSchemaVersion = 1;

struct WaveletSpec {
  WaveletFamily family = WaveletFamily::haar;
  int order = 1;
  int resolution = 12;
};

struct LilSettings {
  std::size_t n_max = 1000000;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::size_t n_start = 100;
  double ratio = 1.1;
  std::size_t window_start = 10000;  // running extremes are taken over [window_start, n_max]
};

struct LemmaSettings {
  std::vector<std::string> densities{"uniform(0,1)", "gaussian(0,1)", "laplace(0,1)"};
  std::vector<WaveletSpec> wavelets{{WaveletFamily::haar, 1, 12}, {WaveletFamily::daubechies, 2, 12}};
  std::vector<int> levels{2, 3, 4, 5, 6};
  int spectrum_max_level = 3;  // dense spectra only up to this level
  bool tails = true;
  std::size_t tail_replications = 500;
};

struct SpectrumSettings {
  int grid_shift = 4;
  std::size_t chaos_draws = 10000;
  std::size_t w_draws = 2000;
};

struct TailSettings {
  std::vector<double> taus{0.5, 1.0, 2.0};
  std::vector<std::size_t> n_list{512, 1024, 2048};
  std::size_t replications = 2000;
  std::vector<int> scaling_levels{2, 3, 4, 5, 6};
  std::size_t scaling_pairs = 10000;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::string density = "uniform(0,1)";
  WaveletSpec wavelet;
  double delta = 0.2;
  double schedule_multiplier = 1.0;
  std::vector<std::size_t> n_list{1024, 16384, 65536};
  std::size_t replications = 2000;
  double box_radius = 2.0;
  std::uint64_t seed = 20240601;
  std::size_t n = 16384;  // sample size for estimate and spectrum
  int level = -1;  // -1: take j from the schedule at n
  std::string out_dir = "out";
  bool brute = false;
  unsigned threads = 1;
  LilSettings lil;
  LemmaSettings lemmas;
  SpectrumSettings spectrum;
  TailSettings tails;
};

/// Throws invalid-config on violated invariants (delta in (0, 1/3), R >= 1,
/// strictly increasing n lists, ...).
void validate_config(const ExperimentConfig& config);
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);
/// FNV-1a over the canonical JSON of everything that affects results
/// (threads and out_dir excluded).
std::string config_hash(const ExperimentConfig& config);

std::shared_ptr<const ScalingTable> build_table(const WaveletSpec& spec);
int effective_level(const ExperimentConfig& config, std::size_t n);

struct CltRow {
  std::size_t n = 0;
  int level = 0;
  double ks_distance = 0.0;
  double be_bound = 0.0;  // n^{-3 delta/16} v n^{-alpha delta} sqrt(log n)
  std::size_t replications = 0;
  double mean_t = 0.0;
  double var_t = 0.0;
  double brute_discrepancy = -1.0;  // max |W fast - W brute| when requested
  std::string error;
};

struct CltResult {
  std::vector<CltRow> rows;
  std::vector<std::vector<double>> t_values;  // [row][replication]
  bool ok = true;
};

/// Replication r at every n uses the sample stream (seed, r), so rows share seeds.
CltResult run_clt_experiment(const ExperimentConfig& config);
void write_clt_csv(const CltResult& result, std::ostream& out);
void write_clt_replications_csv(const CltResult& result, std::ostream& out);

struct LilPoint {
  std::size_t n = 0;
  int level = 0;
  std::int64_t block = 0;
  double t_n = 0.0;
  double l_plus = 0.0;
  double l_minus = 0.0;
  double running_max = 0.0;  // max L^+ so far
  double running_min = 0.0;  // min L^+ so far
};

struct LilTrajectory {
  std::uint64_t seed = 0;
  std::vector<LilPoint> points;
  double window_max_abs = 0.0;  // max |L^±| over [window_start, n_max]
  bool blocks_consistent = true;
  std::size_t level_changes = 0;
};

/// Diagnostic only: the almost-sure limit is not something a finite run can verify.
std::vector<LilTrajectory> run_lil_trajectory(const ExperimentConfig& config);
void write_lil_csv(const LilTrajectory& trajectory, std::ostream& out);

struct LemmaCell {
  std::string wavelet;
  std::string density;
  int level = 0;
  std::optional<LemmaReport> lemmas;
  std::optional<SpectrumReport> spectrum;
  std::optional<IjnReport> ijn;
  double ijn_middle_bound = 0.0;
  std::optional<RestrictedW> w_fast;
  std::optional<RestrictedW> w_brute;
  bool pass = true;
  std::string error;
};

struct WaveletChecks {
  std::string wavelet;
  BasisReport basis;
  KernelIdentityReport kernel;
  bool quadruple_exact = false;
  bool pass = true;
};

struct DensityChecks {
  std::string wavelet;
  std::string density;
  LemmaRateReport rates;
  std::optional<TailComparison> tails;
  bool pass = true;
  std::string error;
};

struct LemmaSuiteReport {
  std::vector<WaveletChecks> wavelets;
  std::vector<LemmaCell> cells;
  std::vector<DensityChecks> series;
  bool all_pass = true;
};

LemmaSuiteReport run_lemma_suite(const ExperimentConfig& config);

struct ChaosComparison {
  int level = 0;
  std::size_t n = 0;
  SpectrumReport spectrum;
  std::vector<double> chaos;
  std::vector<double> scaled_w;  // 2^{3j/2} W_n([-M,M]) / (n sigma(M))
  double ks_distance = 0.0;
};

ChaosComparison run_chaos_comparison(const ExperimentConfig& config);

struct SnCheck {
  int level = 0;
  std::size_t n = 0;
  std::size_t replications = 0;
  double s_n_sq_formula = 0.0;
  double s_n_sq_direct = 0.0;
  double u_nn_sq_mean = 0.0;
  double u_nn_sq_se = 0.0;
  double relative_gap = 0.0;
};

/// Formula n(n-1)/2 2^{-3j} e_n^2 against the Monte Carlo mean of U_nn^2.
SnCheck run_sn_check(const ExperimentConfig& config, std::size_t n, int level);

/// manifest.json text for a run; contains nothing that depends on threads or time.
std::string manifest_json(const ExperimentConfig& config, std::string_view command);

}  // namespace wise
