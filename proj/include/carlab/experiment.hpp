#pragma once

#include <optional>
#include <string>
#include <vector>

#include "carlab/geometry.hpp"
#include "carlab/velocity.hpp"

namespace carlab {

// Parsed and validated experiment description. Optional members are built
// eagerly from their config blocks; accessors resolve the documented
// defaults (slack r = diameter, grid h = 0.02 diameter).
struct ExperimentConfig {
  std::optional<Domain> domain;
  std::optional<VelocityField> field;

  std::string partition_mode = "uniform";
  double sstar = 0.8;
  int cert_samples = 1000;
  double greedy_margin = 0.01;
  int scan_samples = 20000;

  double slack_r = 0.0;  // 0 means "use the domain diameter"

  std::string fixture = "gaussian";
  double grid_h = 0.0;      // 0 means "0.02 * diameter"
  double boundary_h = 0.0;  // 0 means "same as grid_h"
  int time_slices = 33;
  std::optional<Vec> profile_center;
  double profile_width = 0.0;  // 0 means "0.3 * diameter"

  int s_count = 16;
  double c0 = 1.0;
  int family = 10;
  int time_subdivisions = 64;

  double sigma = 1.0;
  double rho = 0.5;

  std::string out_dir = "out";

  double resolved_r() const;
  double resolved_h() const;
  double resolved_boundary_h() const;
};

// JSON text -> config. Unknown keys raise ParseError naming the key;
// violated invariants raise ValidationError naming the invariant.
// `base_dir` resolves relative table paths.
ExperimentConfig parse_config(const std::string& text,
                              const std::string& base_dir = "");

ExperimentConfig load_config(const std::string& path);

struct CheckRecord {
  std::string name;
  bool hard = true;   // hard checks drive the exit code
  bool pass = false;
  double value = 0.0;
  std::string note;
};

struct RunArtifact {
  std::vector<std::string> csv_paths;
  std::vector<CheckRecord> checks;
  int exit_code = 0;
};

// Runs one subcommand (partition | weight | solve | verify-carleman |
// verify-observability | counterexample), writes CSV artifacts plus
// summary.csv under out_dir, and returns the check ledger. Exit code 0 iff
// every hard check passes. `require_observability` promotes the time
// condition to a hard check.
RunArtifact run_experiment(const ExperimentConfig& config,
                           const std::string& subcommand,
                           unsigned long long seed,
                           bool require_observability,
                           const std::string& out_override = "");

// 17-significant-digit round-trip formatting used for every CSV number.
std::string format_g17(double v);

}  // namespace carlab
