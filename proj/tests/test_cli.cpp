#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sospec/cli.hpp"

using namespace sospec;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("sospec_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_binary(const std::string& args) {
  std::string cmd = std::string(SOSPEC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

const char* kB2Sweep = R"({
  "version": 1,
  "model": {"kind": "direct_sum_b2"},
  "n_sweep": {"start": 12, "stop": 48, "step": 6},
  "targets": ["lambda_minus"]
})";

}  // namespace

TEST_CASE("config parsing accepts the documented schema") {
  auto cfg = cli::parse_config_text(kB2Sweep);
  REQUIRE(cfg.sweep.has_value());
  CHECK(cfg.sweep->start == 12);
  CHECK(cfg.targets.size() == 1);
  CHECK(cfg.targets[0].kind == cli::Target::Kind::LambdaMinus);
  CHECK(cfg.seed == 0);
}

TEST_CASE("config parsing rejects malformed documents") {
  using cli::ConfigError;
  CHECK_THROWS_AS(cli::parse_config_text("not json"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config_text(R"({"version": 2, "model": {"kind": "fourier_b1"}})"),
                  ConfigError);
  CHECK_THROWS_AS(cli::parse_config_text(R"({"model": {"kind": "fourier_b1"}})"),
                  ConfigError);
  // unknown keys are rejected at every level
  CHECK_THROWS_AS(
      cli::parse_config_text(
          R"({"version": 1, "model": {"kind": "fourier_b1"}, "typo_key": 3})"),
      ConfigError);
  CHECK_THROWS_AS(
      cli::parse_config_text(
          R"({"version": 1, "model": {"kind": "fourier_b1", "oops": 1}})"),
      ConfigError);
  CHECK_THROWS_AS(
      cli::parse_config_text(
          R"({"version": 1, "model": {"kind": "fourier_b1"}, "n": 4, "n_sweep": {"start": 1, "stop": 2, "step": 1}})"),
      ConfigError);
  CHECK_THROWS_AS(
      cli::parse_config_text(
          R"({"version": 1, "model": {"kind": "fourier_b1", "potential": "demo"}})"),
      ConfigError);
  CHECK_THROWS_AS(
      cli::parse_config_text(
          R"({"version": 1, "model": {"kind": "fourier_b1"}, "targets": ["bogus"]})"),
      ConfigError);
  CHECK_THROWS_AS(
      cli::parse_config_text(
          R"({"version": 1, "model": {"kind": "fourier_b1"}, "grid": {"re_min": 0, "re_max": 0, "im_min": 0, "im_max": 1, "nx": 4, "ny": 4}})"),
      ConfigError);
}

TEST_CASE("format_double is 17-significant-digit lowercase scientific") {
  CHECK(cli::format_double(1.0) == "1.0000000000000000e+00");
  CHECK(cli::format_double(-0.5) == "-5.0000000000000000e-01");
  CHECK(cli::format_double(0.037578) == "3.7578000000000000e-02");
}

TEST_CASE("solve writes spectrum and enclosures") {
  auto dir = fresh_dir("solve_shift");
  cli::RunConfig cfg = cli::parse_config_text(R"({
    "version": 1,
    "model": {"kind": "shift_fixture"},
    "n": 4
  })");
  cli::CommandOptions opt;
  opt.out_dir = dir.string();
  opt.threads = 1;
  CHECK(cli::run_solve(cfg, opt) == 0);

  std::string spectrum = slurp(dir / "spectrum.csv");
  std::istringstream lines(spectrum);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "re,im,residual");
  int rows = 0;
  while (std::getline(lines, line)) {
    double re = 0, im = 0;
    std::sscanf(line.c_str(), "%lf,%lf", &re, &im);
    // defective 2n-fold zero: the fp scatter bound, not machine zero
    CHECK(std::hypot(re, im) < 0.05);
    ++rows;
  }
  CHECK(rows == 8);
  CHECK(fs::exists(dir / "enclosures.csv"));
}

TEST_CASE("solve with B1 targets reports the gap eigenvalue") {
  auto dir = fresh_dir("solve_b1");
  cli::RunConfig cfg = cli::parse_config_text(R"({
    "version": 1,
    "model": {"kind": "fourier_b1"},
    "n": 20,
    "targets": ["lambda_minus"]
  })");
  cli::CommandOptions opt;
  opt.out_dir = dir.string();
  CHECK(cli::run_solve(cfg, opt) == 0);
  std::string nearest = slurp(dir / "nearest.csv");
  std::istringstream lines(nearest);
  std::string header, row;
  std::getline(lines, header);
  CHECK(header == "target,re,im,abs_err");
  REQUIRE(std::getline(lines, row));
  double target = 0, re = 0, im = 0, err = 0;
  REQUIRE(std::sscanf(row.c_str(), "%lf,%lf,%lf,%lf", &target, &re, &im, &err) == 4);
  CHECK(target == doctest::Approx(-0.767357896).epsilon(1e-9));
  CHECK(err < 0.15);
}

TEST_CASE("converge output is byte-identical across worker counts") {
  auto dir1 = fresh_dir("conv_t1");
  auto dir8 = fresh_dir("conv_t8");
  cli::RunConfig cfg = cli::parse_config_text(kB2Sweep);
  cli::CommandOptions o1{dir1.string(), 1, std::nullopt};
  cli::CommandOptions o8{dir8.string(), 8, std::nullopt};
  REQUIRE(cli::run_converge(cfg, o1) == 0);
  REQUIRE(cli::run_converge(cfg, o8) == 0);
  CHECK(slurp(dir1 / "convergence.csv") == slurp(dir8 / "convergence.csv"));
}

TEST_CASE("emitted convergence CSV round-trips byte-identically") {
  auto dir = fresh_dir("conv_roundtrip");
  cli::RunConfig cfg = cli::parse_config_text(R"({
    "version": 1,
    "model": {"kind": "direct_sum_b2"},
    "n_sweep": {"start": 12, "stop": 30, "step": 6},
    "targets": ["lambda_minus"]
  })");
  cli::CommandOptions opt{dir.string(), 2, std::nullopt};
  REQUIRE(cli::run_converge(cfg, opt) == 0);
  std::string original = slurp(dir / "convergence.csv");

  // parse numeric fields and re-emit with the shared formatter
  std::istringstream lines(original);
  std::string line;
  std::getline(lines, line);
  std::string rebuilt = line + "\n";
  while (std::getline(lines, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream fl(line);
    while (std::getline(fl, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.push_back("");
    REQUIRE(fields.size() == 5);
    rebuilt += std::to_string(std::stoi(fields[0]));
    for (int i = 1; i < 5; ++i) {
      rebuilt += ",";
      if (!fields[static_cast<std::size_t>(i)].empty()) {
        rebuilt += cli::format_double(std::stod(fields[static_cast<std::size_t>(i)]));
      }
    }
    rebuilt += "\n";
  }
  CHECK(rebuilt == original);
}

TEST_CASE("oracle command caches by model hash") {
  auto dir = fresh_dir("oracle_cache");
  cli::RunConfig cfg = cli::parse_config_text(R"({
    "version": 1,
    "model": {"kind": "fourier_b1"}
  })");
  cli::CommandOptions opt{dir.string(), 1, std::nullopt};
  REQUIRE(cli::run_oracle(cfg, opt) == 0);
  std::string cold = slurp(dir / "oracle.json");
  CHECK(cold.find("lambda_minus") != std::string::npos);

  int cache_files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().filename().string().starts_with("oracle-")) ++cache_files;
  }
  CHECK(cache_files == 1);

  fs::remove(dir / "oracle.json");
  REQUIRE(cli::run_oracle(cfg, opt) == 0);
  CHECK(slurp(dir / "oracle.json") == cold);
}

TEST_CASE("perturb rejects delta at or above mu/4 without partial output") {
  auto dir = fresh_dir("perturb_bad");
  cli::RunConfig cfg = cli::parse_config_text(R"({
    "version": 1,
    "model": {"kind": "fourier_b1"},
    "n": 10,
    "perturbation": {"delta": 0.2, "w0": 1.0, "w1": 1.0, "trials": 2}
  })");
  cli::CommandOptions opt{dir.string(), 1, std::nullopt};
  CHECK(cli::run_perturb(cfg, opt) == 2);
  CHECK_FALSE(fs::exists(dir / "report.json"));
}

TEST_CASE("perturb writes a seeded reproducible report") {
  auto dir1 = fresh_dir("perturb_a");
  auto dir2 = fresh_dir("perturb_b");
  cli::RunConfig cfg = cli::parse_config_text(R"({
    "version": 1,
    "model": {"kind": "fourier_b1"},
    "n": 16,
    "seed": 77,
    "perturbation": {"delta": 0.05, "w0": 1.0, "w1": 1.0, "trials": 3}
  })");
  cli::CommandOptions o1{dir1.string(), 1, std::nullopt};
  cli::CommandOptions o2{dir2.string(), 3, std::nullopt};
  REQUIRE(cli::run_perturb(cfg, o1) == 0);
  REQUIRE(cli::run_perturb(cfg, o2) == 0);
  CHECK(slurp(dir1 / "report.json") == slurp(dir2 / "report.json"));
  CHECK(slurp(dir1 / "report.json").find("\"eps_bound\"") != std::string::npos);
}

TEST_CASE("pseudospec emits the sigma grid with its header") {
  auto dir = fresh_dir("pseudospec");
  cli::RunConfig cfg = cli::parse_config_text(R"({
    "version": 1,
    "model": {"kind": "shift_fixture"},
    "n": 6,
    "grid": {"re_min": -1.2, "re_max": 1.2, "im_min": -1.2, "im_max": 1.2,
             "nx": 121, "ny": 121},
    "pseudospectrum": {"eps": 0.05, "weights": [1.0, 0.0, 0.0]}
  })");
  cli::CommandOptions opt{dir.string(), 2, std::nullopt};
  REQUIRE(cli::run_pseudospec(cfg, opt) == 0);
  std::string grid = slurp(dir / "sigma_grid.csv");
  std::istringstream lines(grid);
  std::string header, params;
  std::getline(lines, header);
  CHECK(header == "re_min,re_max,im_min,im_max,nx,ny");
  std::getline(lines, params);
  CHECK(params.find(",121,121") != std::string::npos);

  // minimum must be the cell containing 0 (the only spectral point)
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<double> r;
    std::istringstream fl(line);
    std::string f;
    while (std::getline(fl, f, ',')) r.push_back(std::stod(f));
    REQUIRE(r.size() == 121);
    rows.push_back(r);
  }
  REQUIRE(rows.size() == 121);
  double best = 1e300;
  int bi = -1, bj = -1;
  for (int i = 0; i < 121; ++i)
    for (int j = 0; j < 121; ++j)
      if (rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] < best) {
        best = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        bi = i;
        bj = j;
      }
  CHECK(bi == 60);
  CHECK(bj == 60);
  CHECK(fs::exists(dir / "membership.csv"));

  // schedule independence of the grid writer
  auto dir1 = fresh_dir("pseudospec_t1");
  cli::CommandOptions o1{dir1.string(), 1, std::nullopt};
  REQUIRE(cli::run_pseudospec(cfg, o1) == 0);
  CHECK(slurp(dir1 / "sigma_grid.csv") == grid);
}

TEST_CASE("oracle reports FD non-convergence as a numerical failure") {
  // A flat potential has no discrete state; the domain-escalation gate can
  // never settle and the command must exit 3 without writing oracle.json.
  auto dir = fresh_dir("oracle_fd_fail");
  cli::RunConfig cfg = cli::parse_config_text(R"({
    "version": 1,
    "model": {"kind": "schrodinger_hermite", "potential": "zero"},
    "fd": {"halfwidth": 8.0, "points": 400, "count": 1}
  })");
  cli::CommandOptions opt{dir.string(), 1, std::nullopt};
  CHECK(cli::run_oracle(cfg, opt) == 3);
  CHECK_FALSE(fs::exists(dir / "oracle.json"));
}

TEST_CASE("oracle emits harmonic FD values through the CLI") {
  auto dir = fresh_dir("oracle_harmonic");
  cli::RunConfig cfg = cli::parse_config_text(R"({
    "version": 1,
    "model": {"kind": "harmonic_sanity"},
    "fd": {"halfwidth": 12.0, "points": 2000, "count": 3}
  })");
  cli::CommandOptions opt{dir.string(), 1, std::nullopt};
  REQUIRE(cli::run_oracle(cfg, opt) == 0);
  auto doc = nlohmann::json::parse(slurp(dir / "oracle.json"));
  auto values = doc.at("fd").at("values");
  REQUIRE(values.size() == 3);
  CHECK(std::abs(values[0].get<double>() - 1.0) < 1e-5);
  CHECK(std::abs(values[1].get<double>() - 3.0) < 1e-5);
  CHECK(std::abs(values[2].get<double>() - 5.0) < 1e-5);
}

TEST_CASE("seed flag overrides the config seed") {
  auto dir = fresh_dir("seed_override");
  cli::RunConfig cfg = cli::parse_config_text(R"({
    "version": 1,
    "model": {"kind": "fourier_b1"},
    "n": 10,
    "seed": 5,
    "perturbation": {"delta": 0.05, "w0": 1.0, "w1": 1.0, "trials": 1}
  })");
  cli::CommandOptions opt{dir.string(), 1, std::uint64_t{42}};
  REQUIRE(cli::run_perturb(cfg, opt) == 0);
  CHECK(slurp(dir / "report.json").find("\"seed\": 42") != std::string::npos);
}

TEST_CASE("the installed binary honors exit codes") {
  auto dir = fresh_dir("binary");
  fs::path good = dir / "good.json";
  fs::path bad = dir / "bad.json";
  std::ofstream(good) << R"({"version": 1, "model": {"kind": "shift_fixture"}, "n": 3})";
  std::ofstream(bad) << R"({"version": 1, "model": {"kind": "nope"}})";

  CHECK(run_binary("solve --config " + good.string() + " --out " +
                   (dir / "out").string()) == 0);
  CHECK(run_binary("solve --config " + bad.string() + " --out " +
                   (dir / "out2").string()) == 2);
  CHECK(run_binary("converge --config " + good.string() + " --out " +
                   (dir / "out3").string()) == 2);  // no sweep in config
  CHECK(run_binary("--config x") == 2);             // missing subcommand
}
