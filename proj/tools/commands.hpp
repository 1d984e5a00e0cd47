#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "config.hpp"
#include "sbp/fibering.hpp"
#include "sbp/solve.hpp"
#include "sbp/verify.hpp"

namespace sbp::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2, kVerification = 3 };

/// What `fiber` classifies: explicit (A, B, P) or a named profile sampled on
/// the configured grid, e.g. "gaussian:0.5" or "exponential:1".
struct FiberInput {
  std::optional<FiberCoeffs> coeffs;
  std::string profile;
};

int cmd_fiber(const RunConfig& config, const FiberInput& input, double q, std::ostream& out);
int cmd_extremal(const RunConfig& config, std::ostream& out);
int cmd_solve(const RunConfig& config, std::ostream& out);
int cmd_sweep(const RunConfig& config, std::ostream& out);
int cmd_verify(const RunConfig& config, std::ostream& out);

/// Full command line: parses flags, loads the config and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

nlohmann::json to_json(const FiberingReport& r);
nlohmann::json to_json(const ExtremalEstimate& e);
nlohmann::json to_json(const SolutionRecord& r);
nlohmann::json to_json(const SolveFailure& f);
nlohmann::json to_json(const VerifyReport& r);

inline constexpr const char* kSweepHeader =
    "q,J_min,J_mp,res_min,res_mp,nehari_min,nehari_mp,jhat,flags";

/// One row per q; empty cells where a solver failed, flags joined by ';'.
std::string sweep_csv(const SolutionBranch& branch);

}  // namespace sbp::cli
