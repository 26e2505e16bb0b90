#pragma once

// Config parsing, command execution and the deterministic CSV/JSON writers
// behind the sospec command-line tool.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sospec/operators.hpp"
#include "sospec/pipeline.hpp"

namespace sospec {
namespace cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepSpec {
  int start, stop, step;
};

struct GridSpec {
  matpoly::GridRect rect;
  int nx, ny;
};

struct PseudoSpec {
  double eps;
  std::vector<double> weights;
};

struct PerturbSpec {
  double delta;
  double w0, w1;
  int trials;
  std::string target;  // "lambda_minus", "lambda_plus" or a number as string
};

struct FdSpec {
  double halfwidth = 14.0;
  int points = 3000;
  int count = 1;
};

// Target of a study: a literal value or a named oracle value.
struct Target {
  enum class Kind { Number, LambdaMinus, LambdaPlus, FdGround } kind;
  double value = 0.0;
};

struct RunConfig {
  operators::OperatorModel model;
  std::string model_key;  // canonical JSON of the model block, for cache keys
  std::optional<int> n;
  std::optional<SweepSpec> sweep;
  std::vector<Target> targets;
  double imag_cut = 1e308;
  std::optional<GridSpec> grid;
  std::optional<PseudoSpec> pseudo;
  std::optional<PerturbSpec> perturb;
  FdSpec fd;
  std::uint64_t seed = 0;
};

// Parses and strictly validates the versioned JSON config; unknown keys are
// rejected at every level. Throws ConfigError.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

struct CommandOptions {
  std::string out_dir;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::optional<std::uint64_t> seed_override;
};

int run_solve(const RunConfig& cfg, const CommandOptions& opt);
int run_converge(const RunConfig& cfg, const CommandOptions& opt);
int run_pseudospec(const RunConfig& cfg, const CommandOptions& opt);
int run_perturb(const RunConfig& cfg, const CommandOptions& opt);
int run_oracle(const RunConfig& cfg, const CommandOptions& opt);

// Entry point used by tools/main.cpp.
int main_with_args(int argc, const char* const* argv);

// 17-significant-digit lowercase scientific formatting shared by all writers.
std::string format_double(double v);

}  // namespace cli
}  // namespace sospec
