#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sbp/extremal.hpp"
#include "sbp/radial.hpp"
#include "sbp/solve.hpp"

namespace sbp::cli {

/// Malformed or inconsistent configuration; maps to the usage exit code.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct GridConfig {
  double r_max = RadialGrid::default_r_max;
  std::size_t n = RadialGrid::default_n;
  GridScheme scheme = GridScheme::graded;
  double grading = RadialGrid::default_grading;
};

struct SolveConfig {
  /// Required for `solve`; in units of q0_star_lb when relative.
  double q = 0.0;
  bool relative = false;
};

struct SweepConfig {
  double q_lo = 0.2;
  double q_hi = 1.0;
  int steps = 9;
  /// q_lo and q_hi are multiples of q0_star_lb.
  bool relative = true;
};

struct VerifyConfig {
  std::size_t samples = 100;
  double coercivity_q = 1.0;
  bool refinement = true;
  /// Fault injection; 1 in normal use.
  double kernel_scale = 1.0;
};

struct RunConfig {
  ProblemParams params;
  GridConfig grid;
  SolverOptions solver;
  SearchConfig search;
  SolveConfig solve;
  SweepConfig sweep;
  VerifyConfig verify;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::string out_dir = "out";

  /// Throws ConfigError on any invalid field.
  void validate() const;
  GridPtr make_grid() const;
};

nlohmann::json to_json(const RunConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Canonical text of the configuration (sorted keys, two-space indent).
std::string canonical(const RunConfig& c);

}  // namespace sbp::cli
