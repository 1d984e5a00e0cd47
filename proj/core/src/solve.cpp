#include "sbp/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lbfgs.hpp"
#include "parallel.hpp"

namespace sbp {

namespace {

// Internal stopping margin so that the recomputed residual of the final
// rescaled point stays below the user tolerance.
constexpr double kTolMargin = 0.25;
constexpr int kStallWindow = 100;
constexpr double kFoldBand = 1e-6;

double h1_norm(const RadialGrid& g, const std::vector<double>& x, double omega) {
  return std::sqrt(std::max(detail::dotv(x, apply_h1(g, x, omega)), 0.0));
}

}  // namespace

void SolverOptions::validate() const {
  if (!(tol > 0.0) || !(path_tol > 0.0) || !(nehari_tol > 0.0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (max_iter <= 0 || memory <= 0 || path_iter < 0) {
    throw std::invalid_argument("solver budgets must be positive");
  }
  if (path_nodes < 3) throw std::invalid_argument("path needs at least 3 nodes");
  if (!(collapse_fraction > 0.0 && collapse_fraction < 1.0)) {
    throw std::invalid_argument("collapse_fraction must lie in (0, 1)");
  }
}

const char* to_string(SolutionKind k) {
  switch (k) {
    case SolutionKind::global_min: return "global-min";
    case SolutionKind::local_min: return "local-min";
    case SolutionKind::mountain_pass: return "mountain-pass";
  }
  return "?";
}

const char* to_string(FailureKind k) {
  switch (k) {
    case FailureKind::trivial_attractor: return "trivial-attractor";
    case FailureKind::geometry_lost: return "geometry-lost";
    case FailureKind::not_converged: return "not-converged";
    case FailureKind::lost_fiber: return "lost-fiber";
  }
  return "?";
}

Solver::Solver(GridPtr grid, ProblemParams params, NehariGeometry geometry,
               SolverOptions options)
    : grid_(std::move(grid)), params_(params), model_(grid_, params_),
      geometry_(geometry), options_(options) {
  options_.validate();
}

SolutionRecord Solver::make_record(double q, const RadialFunction& u) const {
  const auto fp = model_.parts(u, true);
  SolutionRecord rec;
  rec.q = q;
  rec.u = u;
  rec.coeffs = fp.coeffs;
  rec.energy = EnergyModel::energy_from(fp.coeffs, q);
  rec.residual_norm = model_.stationarity(EnergyModel::gradient_from(fp, q));
  rec.nehari = EnergyModel::nehari_classify(fp.coeffs, q, options_.nehari_tol);
  return rec;
}

SolveOutcome Solver::polish_on_fiber(double q, const RadialFunction& start, bool plus,
                                     int prior_iterations) const {
  const double p = params_.p;
  const double omega = params_.omega;
  const double q2 = q * q;
  double last_t = 1.0;

  detail::Objective obj = [&](const std::vector<double>& x, double& f,
                              std::vector<double>& g) {
    const auto fp = model_.parts(RadialFunction(grid_, x), true);
    const auto& c = fp.coeffs;
    if (!(c.A > 0.0 && c.B > 0.0 && c.P > 0.0)) return false;
    const auto rep = classify_fiber(c, q);
    if (rep.fiber_case != FiberCase::one) return false;
    const double t = plus ? *rep.t_plus : *rep.t_minus;
    f = psi(c, q, t);
    // dJ(t v) from the homogeneities of the three parts, times t.
    const double ka = 0.5 * t * t;
    const double kb = 0.25 * q2 * t * t * t * t;
    const double kp = std::pow(t, p) / p;
    g.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      g[i] = ka * fp.grad_a[i] + kb * fp.grad_b[i] - kp * fp.grad_p[i];
    }
    last_t = t;
    return std::isfinite(f);
  };
  detail::Preconditioner pre = [&](const std::vector<double>& g) {
    return solve_h1(*grid_, g, omega);
  };
  const double target = kTolMargin * options_.tol;
  // Stop once F has not moved for a whole window; a minimizing sequence
  // pressed against the fold q(v) = q lands here.
  double checkpoint = std::numeric_limits<double>::infinity();
  bool stalled = false;
  detail::Callback cb = [&](const detail::LbfgsResult& st) {
    if (st.iterations % kStallWindow == 0) {
      if (checkpoint - st.f <= 1e-10 * std::max(1.0, std::abs(st.f))) {
        stalled = true;
        return false;
      }
      checkpoint = st.f;
    }
    return st.gnorm / last_t > target;
  };

  std::vector<double> x0(start.values().begin(), start.values().end());
  detail::LbfgsOptions opt;
  opt.max_iter = options_.max_iter;
  opt.memory = options_.memory;
  opt.gtol = 0.0;
  opt.first_step = 0.05 * h1_norm(*grid_, x0, omega);
  const auto res = detail::lbfgs_minimize(x0, obj, pre, opt, cb);
  const int iters = prior_iterations + res.iterations;

  SolveFailure fail;
  fail.q = q;
  fail.iterations = iters;
  if (!std::isfinite(res.f)) {
    fail.kind = FailureKind::lost_fiber;
    fail.message = "start point has no critical point on its fiber";
    return fail;
  }
  const RadialFunction v(grid_, res.x);
  const auto c = model_.parts(v, false).coeffs;
  const auto rep = classify_fiber(c, q);
  if (rep.fiber_case != FiberCase::one) {
    fail.kind = FailureKind::lost_fiber;
    fail.message = "fiber degenerated during the polish";
    return fail;
  }
  if (stalled && q_of_u(c) <= q * (1.0 + kFoldBand)) {
    fail.kind = FailureKind::lost_fiber;
    fail.message = "descent is pinned against the fold q(v) = q";
    fail.last_norm = std::sqrt(c.A);
    return fail;
  }
  const double t = plus ? *rep.t_plus : *rep.t_minus;
  auto rec = make_record(q, t * v);
  rec.iterations = iters;
  fail.last_norm = std::sqrt(rec.coeffs.A);
  fail.last_residual = rec.residual_norm;
  if (fail.last_norm < options_.collapse_fraction * geometry_.c_tilde) {
    fail.kind = FailureKind::trivial_attractor;
    fail.message = "norm fell below the Nehari floor";
    return fail;
  }
  if (!(rec.residual_norm <= options_.tol)) {
    fail.kind = FailureKind::not_converged;
    fail.message = "residual above tolerance after the fiber polish";
    return fail;
  }
  if (plus) {
    rec.kind = rec.energy.total < 0.0 ? SolutionKind::global_min : SolutionKind::local_min;
  } else {
    rec.kind = SolutionKind::mountain_pass;
    rec.mp_level = rec.energy.total;
  }
  return rec;
}

SolveOutcome Solver::plain_descent(double q, const RadialFunction& seed) const {
  const double omega = params_.omega;
  const double floor = options_.collapse_fraction * geometry_.c_tilde;
  detail::Objective obj = [&](const std::vector<double>& x, double& f,
                              std::vector<double>& g) {
    const auto fp = model_.parts(RadialFunction(grid_, x), true);
    f = EnergyModel::energy_from(fp.coeffs, q).total;
    g = EnergyModel::gradient_from(fp, q);
    return std::isfinite(f);
  };
  detail::Preconditioner pre = [&](const std::vector<double>& g) {
    return solve_h1(*grid_, g, omega);
  };
  detail::Callback cb = [&](const detail::LbfgsResult& st) {
    return h1_norm(*grid_, st.x, omega) >= floor;
  };
  std::vector<double> x0(seed.values().begin(), seed.values().end());
  detail::LbfgsOptions opt;
  opt.max_iter = options_.max_iter;
  opt.memory = options_.memory;
  opt.gtol = kTolMargin * options_.tol;
  opt.first_step = 0.05 * std::max(h1_norm(*grid_, x0, omega), floor);

  SolveFailure fail;
  fail.q = q;
  if (h1_norm(*grid_, x0, omega) < floor) {
    fail.kind = FailureKind::trivial_attractor;
    fail.message = "seed lies inside the Nehari floor and its fiber has no minimum";
    fail.last_norm = h1_norm(*grid_, x0, omega);
    return fail;
  }
  const auto res = detail::lbfgs_minimize(x0, obj, pre, opt, cb);
  fail.iterations = res.iterations;
  fail.last_norm = h1_norm(*grid_, res.x, omega);
  fail.last_residual = res.gnorm;
  if (fail.last_norm < floor) {
    fail.kind = FailureKind::trivial_attractor;
    fail.message = "descent collapsed towards u = 0";
    return fail;
  }
  const RadialFunction u(grid_, res.x);
  auto rec = make_record(q, u);
  rec.iterations = res.iterations;
  if (!(rec.residual_norm <= options_.tol)) {
    fail.kind = FailureKind::not_converged;
    fail.message = "descent stopped above tolerance";
    fail.last_residual = rec.residual_norm;
    return fail;
  }
  // Land exactly on the fiber's minimum when there is one.
  const auto rep = classify_fiber(rec.coeffs, q);
  if (rep.fiber_case == FiberCase::one) {
    return polish_on_fiber(q, *rep.t_plus * u, true, res.iterations);
  }
  fail.kind = FailureKind::lost_fiber;
  fail.message = "descent stopped at a point whose fiber has no minimum";
  return fail;
}

SolveOutcome Solver::find_minimizer(double q, const RadialFunction& seed) const {
  if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument("q must be positive");
  if (!seed.grid() || !seed.grid()->same_as(*grid_)) {
    throw std::invalid_argument("seed lives on a different grid");
  }
  if (seed.is_zero() || !seed.is_finite()) {
    throw std::invalid_argument("seed must be finite and nonzero");
  }
  const auto c = model_.parts(seed, false).coeffs;
  const auto rep = classify_fiber(c, q);
  if (rep.fiber_case == FiberCase::one) return polish_on_fiber(q, *rep.t_plus * seed, true, 0);
  return plain_descent(q, seed);
}

SolveOutcome Solver::mountain_pass(double q, const SolutionRecord& endpoint) const {
  if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument("q must be positive");
  if (!endpoint.u.grid() || endpoint.u.is_zero()) {
    throw std::invalid_argument("mountain pass needs a nonzero endpoint");
  }
  if (!endpoint.u.grid()->same_as(*grid_)) {
    throw std::invalid_argument("endpoint lives on a different grid");
  }
  const double omega = params_.omega;
  const std::size_t n = grid_->size();
  const std::size_t m = static_cast<std::size_t>(options_.path_nodes);

  // A deep endpoint sits far beyond the hump of its fiber, so the ray is cut
  // at the first t past t_minus where psi has dropped to -psi(t_minus). The
  // rest of the ray only descends and cannot raise the path maximum.
  double t_end = 1.0;
  const auto ec = model_.parts(endpoint.u, false).coeffs;
  const auto erep = classify_fiber(ec, q);
  if (erep.fiber_case == FiberCase::one && *erep.t_minus < 1.0) {
    const double top_level = psi(ec, q, *erep.t_minus);
    const double level = -std::abs(top_level);
    if (psi(ec, q, 1.0) < level) {
      double lo = *erep.t_minus, hi = 1.0;
      for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        (psi(ec, q, mid) > level ? lo : hi) = mid;
      }
      t_end = hi;
    }
  }

  std::vector<std::vector<double>> path(m, std::vector<double>(n));
  std::vector<double> energy(m, 0.0);
  const auto e = endpoint.u.values();
  for (std::size_t k = 0; k < m; ++k) {
    const double s = t_end * static_cast<double>(k) / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < n; ++i) path[k][i] = s * e[i];
  }
  auto eval = [&](std::size_t k) {
    energy[k] = model_.energy(RadialFunction(grid_, path[k]), q).total;
  };
  for (std::size_t k = 1; k < m; ++k) eval(k);

  auto respread = [&] {
    std::vector<double> len(m, 0.0);
    std::vector<double> diff(n);
    for (std::size_t k = 1; k < m; ++k) {
      for (std::size_t i = 0; i < n; ++i) diff[i] = path[k][i] - path[k - 1][i];
      len[k] = len[k - 1] + h1_norm(*grid_, diff, omega);
    }
    const auto old = path;
    std::size_t seg = 1;
    for (std::size_t k = 1; k + 1 < m; ++k) {
      const double target = len[m - 1] * static_cast<double>(k) / static_cast<double>(m - 1);
      while (seg + 1 < m && len[seg] < target) ++seg;
      const double span = len[seg] - len[seg - 1];
      const double w = span > 0.0 ? (target - len[seg - 1]) / span : 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        path[k][i] = (1.0 - w) * old[seg - 1][i] + w * old[seg][i];
      }
    }
    for (std::size_t k = 1; k + 1 < m; ++k) eval(k);
  };

  SolveFailure fail;
  fail.q = q;
  auto top = [&] {
    return static_cast<std::size_t>(
        std::max_element(energy.begin() + 1, energy.end() - 1) - energy.begin());
  };

  double tau = 1.0;
  int it = 0;
  for (; it < options_.path_iter; ++it) {
    const std::size_t k = top();
    if (energy[k] < geometry_.barrier) {
      fail.kind = FailureKind::geometry_lost;
      fail.message = "path maximum fell below the mountain-pass barrier estimate";
      fail.iterations = it;
      return fail;
    }
    const auto g = model_.gradient(RadialFunction(grid_, path[k]), q);
    const auto s = solve_h1(*grid_, g, omega);
    const double g2 = detail::dotv(g, s);
    if (std::sqrt(std::max(g2, 0.0)) <= options_.path_tol) break;
    std::vector<double> trial(n);
    bool moved = false;
    tau = std::min(4.0 * tau, 1.0);
    for (int bt = 0; bt < 50; ++bt) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = path[k][i] - tau * s[i];
      const double ft = model_.energy(RadialFunction(grid_, trial), q).total;
      if (ft <= energy[k] - 1e-4 * tau * g2) {
        path[k] = trial;
        energy[k] = ft;
        moved = true;
        break;
      }
      tau *= 0.5;
    }
    if (!moved) break;
    respread();
  }

  const std::size_t k = top();
  const double path_max = energy[k];
  const RadialFunction v(grid_, path[k]);
  const auto rep = classify_fiber(model_.parts(v, false).coeffs, q);
  if (rep.fiber_case != FiberCase::one) {
    fail.kind = FailureKind::lost_fiber;
    fail.message = "highest path node has no fiber maximum";
    fail.iterations = it;
    return fail;
  }
  auto out = polish_on_fiber(q, *rep.t_minus * v, false, it);
  if (auto* rec = std::get_if<SolutionRecord>(&out)) {
    rec->path_max = path_max;
    if (!(rec->energy.total > std::max(0.0, endpoint.energy.total))) {
      fail.kind = FailureKind::not_converged;
      fail.message = "mountain-pass energy does not exceed max(0, endpoint energy)";
      fail.iterations = rec->iterations;
      fail.last_residual = rec->residual_norm;
      return fail;
    }
  }
  return out;
}

SolutionBranch continue_branch(const Solver& solver, const BranchConfig& config,
                               const RadialFunction& default_seed) {
  if (!(config.q_lo > 0.0) || !(config.q_hi >= config.q_lo)) {
    throw std::invalid_argument("branch needs 0 < q_lo <= q_hi");
  }
  if (config.q_hi > config.q_lo && config.steps < 2) {
    throw std::invalid_argument("branch needs at least two steps");
  }
  const std::size_t count =
      config.q_hi == config.q_lo ? 1 : static_cast<std::size_t>(config.steps);

  SolutionBranch branch;
  branch.points.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    branch.points[k].q =
        count == 1 ? config.q_lo
                   : config.q_lo + (config.q_hi - config.q_lo) * static_cast<double>(k) /
                                       static_cast<double>(count - 1);
  }

  auto solve_cell = [&](BranchPoint& pt, const RadialFunction& seed, bool retry) {
    auto out = solver.find_minimizer(pt.q, seed);
    if (retry && std::holds_alternative<SolveFailure>(out)) {
      out = solver.find_minimizer(pt.q, default_seed);
    }
    if (auto* rec = std::get_if<SolutionRecord>(&out)) {
      pt.minimizer = *rec;
      auto mp = solver.mountain_pass(pt.q, *rec);
      if (auto* w = std::get_if<SolutionRecord>(&mp)) {
        pt.mountain = *w;
      } else {
        pt.mp_failure = std::get<SolveFailure>(mp);
      }
    } else {
      pt.min_failure = std::get<SolveFailure>(out);
    }
  };

  if (config.jobs <= 1) {
    const RadialFunction* warm = nullptr;
    for (auto& pt : branch.points) {
      solve_cell(pt, warm ? *warm : default_seed, warm != nullptr);
      warm = pt.minimizer ? &pt.minimizer->u : nullptr;
    }
  } else {
    detail::parallel_for(count, config.jobs,
                         [&](std::size_t k) { solve_cell(branch.points[k], default_seed, false); });
  }

  std::vector<FiberCoeffs> recovered;
  for (const auto& pt : branch.points) {
    if (pt.minimizer) recovered.push_back(pt.minimizer->coeffs);
  }
  for (auto& pt : branch.points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : recovered) {
      const auto rep = classify_fiber(c, pt.q);
      if (rep.fiber_case == FiberCase::one) best = std::min(best, psi(c, pt.q, *rep.t_plus));
    }
    pt.jhat = std::isfinite(best) ? best : std::numeric_limits<double>::quiet_NaN();

    if (pt.min_failure) pt.flags.push_back(std::string("min-") + to_string(pt.min_failure->kind));
    if (pt.mp_failure) pt.flags.push_back(std::string("mp-") + to_string(pt.mp_failure->kind));
    if (pt.minimizer && pt.mountain) {
      const double ju = pt.minimizer->energy.total;
      const double jw = pt.mountain->energy.total;
      if (std::abs(jw - ju) <= 1e-6 * std::max(1.0, std::abs(ju))) {
        pt.flags.push_back("collapse-suspected");
      }
    }
    if (!std::isfinite(pt.jhat)) pt.flags.push_back("jhat-unavailable");
    if (config.q0_reference > 0.0 && pt.q > config.q0_reference) pt.flags.push_back("above-q0");
  }
  return branch;
}

}  // namespace sbp
