#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sbp/energy.hpp"
#include "sbp/radial.hpp"

namespace sbp {

struct SolverOptions {
  /// Converged when ||dJ||_{H^-1} <= tol.
  double tol = 1e-6;
  int max_iter = 3000;
  int memory = 8;
  /// Collapse to the trivial solution is declared below this multiple of C~.
  double collapse_fraction = 0.5;
  /// Mountain-pass path discretization and budget.
  int path_nodes = 16;
  int path_iter = 300;
  double path_tol = 1e-5;
  double nehari_tol = default_nehari_tol;

  /// Throws std::invalid_argument unless tolerances and budgets are positive.
  void validate() const;
};

enum class SolutionKind { global_min, local_min, mountain_pass };

const char* to_string(SolutionKind k);

struct SolutionRecord {
  double q = 0.0;
  RadialFunction u;
  EnergyBreakdown energy;
  FiberCoeffs coeffs;
  double residual_norm = 0.0;
  NehariReport nehari;
  SolutionKind kind = SolutionKind::global_min;
  /// Mountain-pass level (energy of the polished critical point).
  std::optional<double> mp_level;
  /// Highest energy on the deformed path before the polish.
  std::optional<double> path_max;
  int iterations = 0;
};

enum class FailureKind { trivial_attractor, geometry_lost, not_converged, lost_fiber };

const char* to_string(FailureKind k);

struct SolveFailure {
  FailureKind kind = FailureKind::not_converged;
  double q = 0.0;
  std::string message;
  double last_norm = 0.0;
  double last_residual = 0.0;
  int iterations = 0;
};

using SolveOutcome = std::variant<SolutionRecord, SolveFailure>;

/// Critical point search for one (grid, params) pair.
///
/// Minimizers: when the seed's fiber has a local minimum t_plus, the solver
/// minimizes F(v) = J_q(t_plus(v) v), which is invariant under v -> c v and
/// whose critical points are critical points of J_q on the Nehari set N+.
/// Its gradient is t_plus dJ(t_plus v). Otherwise plain descent on J_q runs
/// from the seed and is stopped once the norm falls below the collapse floor.
///
/// Mountain pass: a discrete path from 0 to the endpoint is deformed by
/// moving its highest node along the Sobolev gradient and re-spreading nodes
/// by H^1 arclength. The highest node is then polished by minimizing
/// J_q(t_minus(v) v), the same reduction on N-.
class Solver {
public:
  Solver(GridPtr grid, ProblemParams params, NehariGeometry geometry,
         SolverOptions options = {});

  SolveOutcome find_minimizer(double q, const RadialFunction& seed) const;
  /// Throws std::invalid_argument if the endpoint is zero.
  SolveOutcome mountain_pass(double q, const SolutionRecord& endpoint) const;

  const EnergyModel& model() const { return model_; }
  const NehariGeometry& geometry() const { return geometry_; }
  const SolverOptions& options() const { return options_; }

private:
  SolveOutcome polish_on_fiber(double q, const RadialFunction& start, bool plus,
                               int prior_iterations) const;
  SolveOutcome plain_descent(double q, const RadialFunction& seed) const;
  SolutionRecord make_record(double q, const RadialFunction& u) const;

  GridPtr grid_;
  ProblemParams params_;
  EnergyModel model_;
  NehariGeometry geometry_;
  SolverOptions options_;
};

struct BranchPoint {
  double q = 0.0;
  std::optional<SolutionRecord> minimizer;
  std::optional<SolutionRecord> mountain;
  std::optional<SolveFailure> min_failure;
  std::optional<SolveFailure> mp_failure;
  /// Upper estimate of J^_q = inf J_q over N+ and N0.
  double jhat = 0.0;
  std::vector<std::string> flags;
};

struct SolutionBranch {
  std::vector<BranchPoint> points;
};

struct BranchConfig {
  double q_lo = 0.0;
  double q_hi = 0.0;
  int steps = 2;
  unsigned jobs = 1;
  /// Reference value for the "above-q0" flag; ignored when zero.
  double q0_reference = 0.0;
};

/// Sweeps q over an evenly spaced grid. With one job each minimizer is warm
/// started from the previous one; with more jobs every cell starts from
/// default_seed. jhat at q is the smallest fiber minimum psi(t_plus) over all
/// minimizer profiles recovered anywhere on the branch, which is nondecreasing
/// in q by construction.
SolutionBranch continue_branch(const Solver& solver, const BranchConfig& config,
                               const RadialFunction& default_seed);

}  // namespace sbp
