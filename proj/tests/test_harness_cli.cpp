#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "test_util.hpp"
#include "wise/cli.hpp"
#include "wise/error.hpp"
#include "wise/harness.hpp"

using namespace wise;
using wise::testing::code_of;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wise_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(WISE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_clt() {
  ExperimentConfig c;
  c.n_list = {64, 256};
  c.replications = 40;
  return c;
}

}  // namespace

TEST_CASE("config defaults and round trip") {
  const ExperimentConfig d = parse_config("{}");
  CHECK(d.schema_version == 1);
  CHECK(d.delta == 0.2);
  CHECK(d.n_list == std::vector<std::size_t>{1024, 16384, 65536});
  CHECK(d.replications == 2000);
  CHECK(d.seed == 20240601);
  CHECK(d.lemmas.levels == std::vector<int>{2, 3, 4, 5, 6});

  const ExperimentConfig c = parse_config(R"J({"schema_version": 1, "density": "gaussian(0,1)",
      "wavelet": {"family": "daubechies", "order": 2, "resolution": 10}, "n_list": [100, 200],
      "lil": {"n_max": 5000}, "tails": {"taus": [1.5]}})J");
  CHECK(c.density == "gaussian(0,1)");
  CHECK(c.wavelet.family == WaveletFamily::daubechies);
  CHECK(c.wavelet.order == 2);
  CHECK(c.wavelet.resolution == 10);
  CHECK(c.lil.n_max == 5000);
  CHECK(c.tails.taus == std::vector<double>{1.5});

  const ExperimentConfig back = parse_config(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(config_hash(back) == config_hash(c));
}

TEST_CASE("config errors") {
  CHECK(code_of([] { parse_config("{not json"); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { parse_config(R"({"sed": 1})"); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { parse_config(R"({"lil": {"nmax": 1}})"); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { parse_config(R"({"schema_version": 2})"); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { parse_config(R"({"n_list": [1024, 1024]})"); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { parse_config(R"({"delta": 0.4})"); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { parse_config(R"({"delta": 0})"); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { parse_config(R"({"replications": 0})"); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { parse_config(R"({"wavelet": {"family": "coiflet"}})"); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { parse_config(R"({"seed": "abc"})"); }) == ErrorCode::invalid_config);
  CHECK(code_of([] { load_config("/nonexistent/wise.json"); }) == ErrorCode::io_failure);
}

TEST_CASE("config hash ignores threads and output directory only") {
  ExperimentConfig a;
  ExperimentConfig b;
  b.threads = 8;
  b.out_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.seed = 7;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(manifest_json(a, "clt") == manifest_json(ExperimentConfig{a}, "clt"));
  ExperimentConfig t = a;
  t.threads = 5;
  CHECK(manifest_json(a, "clt") == manifest_json(t, "clt"));
}

TEST_CASE("effective level follows the schedule unless pinned") {
  ExperimentConfig c;
  CHECK(effective_level(c, 1024) == 2);
  CHECK(effective_level(c, 65536) == 3);
  c.level = 5;
  CHECK(effective_level(c, 1024) == 5);
}

TEST_CASE("empty lemma matrix passes trivially") {
  ExperimentConfig c;
  c.lemmas.densities.clear();
  c.lemmas.wavelets.clear();
  const LemmaSuiteReport r = run_lemma_suite(c);
  CHECK(r.all_pass);
  CHECK(r.cells.empty());
}

TEST_CASE("trajectory shorter than 100 points is rejected") {
  ExperimentConfig c;
  c.lil.n_max = 99;
  CHECK(code_of([&] { run_lil_trajectory(c); }) == ErrorCode::trajectory_too_short);
}

TEST_CASE("clt experiment is independent of the thread count") {
  ExperimentConfig c = small_clt();
  const CltResult a = run_clt_experiment(c);
  c.threads = 3;
  const CltResult b = run_clt_experiment(c);
  REQUIRE(a.rows.size() == 2);
  CHECK(a.t_values == b.t_values);
  std::ostringstream oa;
  std::ostringstream ob;
  write_clt_csv(a, oa);
  write_clt_csv(b, ob);
  CHECK(oa.str() == ob.str());
  CHECK(oa.str().rfind("n,j,ks_distance,be_bound,replications,mean_t,var_t,error\n", 0) == 0);
  for (const CltRow& r : a.rows) {
    CHECK(r.error.empty());
    CHECK(r.ks_distance >= 0.0);
    CHECK(r.ks_distance <= 1.0);
    CHECK(r.replications == 40);
  }
  // replication r shares its stream across n: rows differ only through n
  CHECK(a.t_values[0] != a.t_values[1]);
}

TEST_CASE("command-line exit codes") {
  CHECK(run_tool("--help") == kExitOk);
  CHECK(run_tool("") == kExitUsage);
  CHECK(run_tool("frobnicate") == kExitUsage);
  CHECK(run_tool("clt --threads 0") == kExitUsage);
  CHECK(run_tool("clt --config /nonexistent/wise.json") == kExitUsage);

  const fs::path dir = scratch("cli");
  {
    std::ofstream bad(dir / "bad.json");
    bad << R"({"delta": 0.5})";
  }
  CHECK(run_tool("clt --config " + (dir / "bad.json").string() + " --out-dir " + (dir / "o").string()) ==
        kExitUsage);
  {
    std::ofstream lvl(dir / "level.json");
    lvl << R"({"n": 64, "level": 40})";
  }
  CHECK(run_tool("estimate --config " + (dir / "level.json").string() + " --out-dir " + (dir / "o").string()) ==
        kExitNumeric);
  {
    std::ofstream ok(dir / "ok.json");
    ok << R"({"n": 256})";
  }
  const fs::path out = dir / "est";
  CHECK(run_tool("estimate --config " + (dir / "ok.json").string() + " --out-dir " + out.string()) == kExitOk);
  CHECK(fs::exists(out / "estimate.csv"));
  CHECK(fs::exists(out / "coefficients.csv"));
  CHECK(fs::exists(out / "estimate.json"));
  CHECK(slurp(out / "manifest.json").find("\"config_hash\"") != std::string::npos);

  // an output path that is a regular file cannot be created
  CHECK(run_tool("estimate --config " + (dir / "ok.json").string() + " --out-dir " + (dir / "ok.json").string()) ==
        kExitIo);
  fs::remove_all(dir);
}
