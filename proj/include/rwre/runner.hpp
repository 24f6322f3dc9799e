#pragma once
// Experiment runner: a scenario registry over the simulation modules, a
// human-editable key=value configuration, deterministic per-replication
// seeding, a small worker pool, and reproducible CSV/JSONL/manifest output.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rwre::runner {

inline constexpr const char* kVersion = "0.1.0";

// One key per line, "key = value", '#' starts a comment. Ladders are comma
// separated and explicit (never ranges) so manifests stay exact.
struct ExperimentConfig {
  std::string scenario = "sinai";
  std::vector<long> ladder{100};
  int replications = 1;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int workers = 1;

  // model parameters; each scenario reads the subset it needs
  double beta = 1.0;       // bias base (brw_bias)
  double gamma = 1.0;      // bias exponent scale
  double p = 0.5;          // barrier rightward probability / poisson-log p
  double q = 0.5;          // poisson-log q
  double lambda = 0.25;    // barrier mark probability / poisson intensity
  double sigma = 1.0;      // log-rho or potential volatility
  std::string alpha0_rule = "sqrt-half";  // or "const:<value>"
  std::string offspring = "geometric-half";  // or geometric:<p> / poisson:<mean>
  int d = 1;               // mark dimension
  std::string step_law = "gaussian";
  double step_sigma = 1.0;
  long long horizon = 0;   // walk steps; 0 = scenario default
  double time_horizon = 1.0;  // continuous horizon (brox)
  double mesh = 0.01;
  double half_width = 8.0;
  int walkers = 64;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);
// Canonical echo; parse_config_text(config_to_text(c)) reproduces c exactly.
std::string config_to_text(const ExperimentConfig& c);
bool config_equal(const ExperimentConfig& a, const ExperimentConfig& b);

// Violated invariants, without running anything; empty means valid.
std::vector<std::string> validate(const ExperimentConfig& c);

double alpha0_for(const ExperimentConfig& c, long n);

struct RunManifest {
  std::string config_echo;
  std::string version;
  std::vector<std::uint64_t> rep_seeds;  // one per (ladder value, replication)
  double wall_seconds = 0.0;
  std::vector<std::string> files;
};

// Executes the scenario over ladder x replications. Statistics files are
// byte-identical across runs with the same config and seed; the manifest's
// wall clock is the only varying output.
RunManifest run(const ExperimentConfig& c);

void write_manifest(std::ostream& os, const RunManifest& m);

}  // namespace rwre::runner
