#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sbp/check.hpp"
#include "sbp/radial.hpp"

namespace sbp {

/// One invariant evaluated over a sample set. Every check reports a slack
/// whose sign convention is "nonnegative is good": rhs - lhs for an
/// inequality lhs <= rhs and minus the relative error for an identity. The
/// check passes when the worst slack is >= -tolerance.
struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::not_applicable;
  double worst_slack = 0.0;
  double tolerance = 0.0;
  std::size_t samples = 0;
  /// Label of the sample that produced worst_slack.
  std::string worst_sample;
  /// Worst slack of the same samples on a grid with twice the intervals.
  std::optional<double> refined_slack;
  std::string note;
};

struct GridSummary {
  double r_max = 0.0;
  std::size_t n = 0;
  GridScheme scheme = GridScheme::graded;
  double grading = 0.0;
};

GridSummary summarize(const RadialGrid& grid);

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  ProblemParams params;
  GridSummary grid;

  /// True when no check failed; not-applicable checks count as passing.
  bool all_pass() const;
};

struct SuiteOptions {
  /// Charge used by the coercivity certificate.
  double coercivity_q = 1.0;
  /// Re-evaluate the inequality checks on a refined grid and fail them if
  /// the refined worst slack falls below min(worst slack, 0) - tolerance.
  bool refinement = true;
  unsigned jobs = 1;
  /// Multiplies the potential kernel. Fault injection only; any value other
  /// than 1 must make the D-norm identity fail.
  double kernel_scale = 1.0;
};

/// Runs every check over `samples` seeded random profiles plus a fixed set of
/// Gaussians and exponentials. Deterministic for a given seed and
/// independent of the job count.
VerifyReport run_suite(const ProblemParams& params, const GridPtr& grid, std::uint64_t seed,
                       std::size_t samples, const SuiteOptions& options = {});

struct CoercivityReport {
  double q = 0.0;
  double epsilon = 0.0;
  /// q^2 / (16 pi) - epsilon^4.
  double d = 0.0;
  double lhs = 0.0;  // J_q(u)
  double rhs = 0.0;  // ||u||^2 / 4 + D ||phi_u||_D^2 + int f(u)
  double slack = 0.0;
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::pass;
};

/// (q^2 / (32 pi))^{1/4}, which puts D at q^2 / (32 pi).
double default_coercivity_epsilon(double q);

/// Lower bound J_q(u) >= ||u||^2 / 4 + D ||phi_u||_D^2 + int f(u) with
/// f(t) = (omega / 4) t^2 + (pi epsilon^2 / 4) |t|^3 - |t|^p / p.
/// Throws std::invalid_argument unless D > 0.
CoercivityReport coercivity_certificate(const RadialFunction& u, double q, double epsilon,
                                        const ProblemParams& params,
                                        double tolerance = 1e-8);

}  // namespace sbp
