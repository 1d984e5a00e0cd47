#include "sbp/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "parallel.hpp"
#include "sbp/energy.hpp"
#include "sbp/extremal.hpp"
#include "sbp/fibering.hpp"
#include "sbp/potential.hpp"
#include "sbp/profiles.hpp"

namespace sbp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Sample {
  std::string label;
  RadialFunction u;
};

std::vector<Sample> build_samples(const GridPtr& grid, std::uint64_t seed, std::size_t count) {
  std::vector<Sample> out;
  ProfileSampler sampler(seed);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back({"random#" + std::to_string(k), sampler.next(grid)});
  }
  for (double alpha : {0.1, 0.5, 2.0}) {
    out.push_back({"gaussian(" + std::to_string(alpha) + ")", gaussian_profile(grid, alpha)});
  }
  for (double alpha : {0.5, 1.0, 2.0}) {
    out.push_back({"exponential(" + std::to_string(alpha) + ")", exponential_profile(grid, alpha)});
  }
  return out;
}

// Per-sample slacks, one slot per check. Inapplicable entries stay at +inf.
enum Slot {
  kCube,
  kSubordination,
  kDNorm,
  kN0,
  kZeroEnergy,
  kPartition,
  kCoercivity,
  kFloor,
  kSlots
};

struct Context {
  const ProblemParams& params;
  const GridPtr& grid;
  PotentialOperator potential;
  EnergyModel model;
  double coercivity_q;
  double c_emb;
  double c_tilde;
};

double rel_err(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

std::array<double, kSlots> evaluate(const Context& ctx, const RadialFunction& u) {
  std::array<double, kSlots> s;
  s.fill(kInf);
  const ProblemParams& pp = ctx.params;
  const double p = pp.p;

  const auto sol = ctx.potential.solve(u);
  s[kCube] = cube_norm_bound(u, sol).slack;
  if (pp.a > 0.0) s[kSubordination] = -check_subordination(sol, pp).max_excess;
  s[kDNorm] = -rel_err(sol.d_norm_sq, 4.0 * kPi * sol.b_coupling);

  const auto c = ctx.model.parts(u, false).coeffs;

  // N0 point of u's fiber: psi' = psi'' = 0 at t(u), energy (p - 2) / (4p) ||.||^2.
  {
    const auto ext = extremal_point(c);
    const FiberCoeffs w{c.A * ext.t * ext.t, c.B * std::pow(ext.t, 4.0),
                        c.P * std::pow(ext.t, p), p};
    const double e = EnergyModel::energy_from(w, ext.q).total;
    double worst = 0.0;
    worst = std::max(worst, std::abs(dpsi(w, ext.q, 1.0)) / w.A);
    worst = std::max(worst, std::abs(d2psi(w, ext.q, 1.0)) / w.A);
    worst = std::max(worst, rel_err(e, (p - 2.0) / (4.0 * p) * w.A));
    worst = std::max(worst, rel_err(w.P, 2.0 / (4.0 - p) * w.A));
    s[kN0] = -worst;
  }

  // Fibers are nonnegative from q0(u) on and dip below zero just under it.
  {
    const double q0 = q0_of_u(c);
    double worst = kInf;
    for (double f : {1.0, 1.5, 3.0}) worst = std::min(worst, fiber_min(c, f * q0) / c.A);
    const auto rep = classify_fiber(c, 0.99 * q0);
    worst = std::min(worst, rep.fiber_case == FiberCase::one
                                ? -psi(c, 0.99 * q0, *rep.t_plus) / c.A
                                : -kInf);
    s[kZeroEnergy] = worst;
  }

  {
    const double qu = q_of_u(c);
    struct Probe {
      double f;
      FiberCase want;
    };
    int violations = 0;
    for (const Probe& pr : {Probe{0.5, FiberCase::one}, Probe{0.9, FiberCase::one},
                            Probe{1.0, FiberCase::two}, Probe{1.1, FiberCase::three},
                            Probe{2.0, FiberCase::three}}) {
      if (classify_fiber(c, pr.f * qu).fiber_case != pr.want) ++violations;
    }
    s[kPartition] = -static_cast<double>(violations);
  }

  const double eps = default_coercivity_epsilon(ctx.coercivity_q);
  s[kCoercivity] = coercivity_certificate(u, ctx.coercivity_q, eps, pp).slack;

  // Nehari points of the fiber at q = q(u) / 2 must clear the floor C~.
  {
    const auto rep = classify_fiber(c, 0.5 * q_of_u(c));
    double worst = kInf;
    for (double t : {*rep.t_minus, *rep.t_plus}) {
      worst = std::min(worst, (t * std::sqrt(c.A) - ctx.c_tilde) / ctx.c_tilde);
    }
    s[kFloor] = worst;
  }
  return s;
}

struct SlotResult {
  double worst = kInf;
  std::string label;
};

std::array<SlotResult, kSlots> run_samples(const Context& ctx, const std::vector<Sample>& samples,
                                           unsigned jobs) {
  std::vector<std::array<double, kSlots>> vals(samples.size());
  detail::parallel_for(samples.size(), jobs,
                       [&](std::size_t i) { vals[i] = evaluate(ctx, samples[i].u); });
  std::array<SlotResult, kSlots> out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (int k = 0; k < kSlots; ++k) {
      if (vals[i][k] < out[k].worst || (std::isnan(vals[i][k]) && !std::isnan(out[k].worst))) {
        out[k].worst = vals[i][k];
        out[k].label = samples[i].label;
      }
    }
  }
  return out;
}

CheckResult make_check(const std::string& name, const SlotResult& r, double tol, std::size_t n) {
  CheckResult c;
  c.name = name;
  c.tolerance = tol;
  c.samples = n;
  c.worst_slack = r.worst;
  c.worst_sample = r.label;
  c.status = r.worst >= -tol ? CheckStatus::pass : CheckStatus::fail;
  return c;
}

// phi of u = e^{-r^2} for the pure Coulomb kernel.
double coulomb_gaussian(double r) {
  const double k = std::pow(kPi, 1.5) / (2.0 * std::sqrt(2.0));
  if (r < 1e-6) return kPi * (1.0 - 2.0 * r * r / 3.0);
  return k * std::erf(std::sqrt(2.0) * r) / r;
}

CheckResult coulomb_reduction(const ProblemParams& params, const GridPtr& grid,
                              double kernel_scale) {
  CheckResult c;
  c.name = "coulomb-reduction";
  c.tolerance = 1e-6;
  if (params.a != 0.0) {
    c.note = "a > 0: the screened kernel is covered by subordination";
    return c;
  }
  const PotentialOperator op(grid, 0.0, kernel_scale);
  const auto phi = op.phi_values(gaussian_profile(grid, 1.0));
  const auto r = grid->r();
  double worst = kInf;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double e = -std::abs(phi[i] - coulomb_gaussian(r[i])) / coulomb_gaussian(r[i]);
    if (e < worst) {
      worst = e;
      c.worst_sample = "gaussian(1) at r=" + std::to_string(r[i]);
    }
  }
  c.samples = 1;
  c.worst_slack = worst;
  c.status = worst >= -c.tolerance ? CheckStatus::pass : CheckStatus::fail;
  c.note = "closed-form Newton potential of e^{-r^2}";
  return c;
}

}  // namespace

GridSummary summarize(const RadialGrid& grid) {
  return {grid.r_max(), grid.size(), grid.scheme(), grid.grading()};
}

bool VerifyReport::all_pass() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckStatus::fail; });
}

double default_coercivity_epsilon(double q) {
  return std::pow(q * q / (32.0 * kPi), 0.25);
}

CoercivityReport coercivity_certificate(const RadialFunction& u, double q, double epsilon,
                                        const ProblemParams& params, double tolerance) {
  params.validate();
  CoercivityReport rep;
  rep.q = q;
  rep.epsilon = epsilon;
  rep.tolerance = tolerance;
  rep.d = q * q / (16.0 * kPi) - std::pow(epsilon, 4.0);
  if (!(rep.d > 0.0)) {
    throw std::invalid_argument("coercivity certificate needs D = q^2/(16 pi) - epsilon^4 > 0");
  }
  const double p = params.p;
  const auto sol = solve_potential(u, params);
  rep.lhs = EnergyModel(u.grid(), params).energy(u, q).total;

  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = std::abs(u[i]);
    f[i] = 0.25 * params.omega * t * t + 0.25 * kPi * epsilon * epsilon * t * t * t -
           std::pow(t, p) / p;
  }
  rep.rhs = 0.25 * h1_norm_sq(u, params) + rep.d * sol.d_norm_sq + integrate(*u.grid(), f);
  rep.slack = rep.lhs - rep.rhs;
  rep.status = rep.slack >= -tolerance ? CheckStatus::pass : CheckStatus::fail;
  return rep;
}

VerifyReport run_suite(const ProblemParams& params, const GridPtr& grid, std::uint64_t seed,
                       std::size_t samples, const SuiteOptions& options) {
  params.validate();
  if (!grid) throw std::invalid_argument("run_suite needs a grid");

  VerifyReport rep;
  rep.seed = seed;
  rep.samples = samples;
  rep.params = params;
  rep.grid = summarize(*grid);

  const double c_emb = estimate_embedding_constant(grid, params);
  const double c_tilde = nehari_geometry(c_emb, params.p).c_tilde;
  auto context = [&](const GridPtr& g) {
    return Context{params,
                   g,
                   PotentialOperator(g, params.a, options.kernel_scale),
                   EnergyModel(g, params),
                   options.coercivity_q,
                   c_emb,
                   c_tilde};
  };

  const auto set = build_samples(grid, seed, samples);
  const auto res = run_samples(context(grid), set, options.jobs);
  const std::size_t n = set.size();

  std::array<SlotResult, kSlots> fine;
  if (options.refinement) {
    const auto g2 = make_grid(grid->r_max(), 2 * grid->size() - 1, grid->scheme(), grid->grading());
    fine = run_samples(context(g2), build_samples(g2, seed, samples), options.jobs);
  }
  auto inequality = [&](const std::string& name, Slot slot, double tol) {
    auto c = make_check(name, res[slot], tol, n);
    if (options.refinement) {
      c.refined_slack = fine[slot].worst;
      // A positive slack may move with the discretization; what must not
      // happen is a violation appearing or growing.
      if (fine[slot].worst < std::min(res[slot].worst, 0.0) - tol) {
        c.status = CheckStatus::fail;
        c.note = "worst slack degrades under refinement";
      }
    }
    return c;
  };

  rep.checks.push_back(inequality("cube-norm-bound", kCube, 1e-6));
  if (params.a > 0.0) {
    rep.checks.push_back(inequality("subordination", kSubordination, 1e-6));
  } else {
    CheckResult c;
    c.name = "subordination";
    c.tolerance = 1e-6;
    c.note = "a = 0: replaced by coulomb-reduction";
    rep.checks.push_back(c);
  }
  rep.checks.push_back(coulomb_reduction(params, grid, options.kernel_scale));
  rep.checks.push_back(make_check("d-norm-identity", res[kDNorm], 1e-3, n));
  rep.checks.push_back(make_check("nehari-zero-identities", res[kN0], 1e-10, n));
  rep.checks.push_back(make_check("zero-energy-level", res[kZeroEnergy], 1e-8, n));
  rep.checks.push_back(make_check("fiber-partition", res[kPartition], 0.0, n));
  rep.checks.push_back(inequality("coercivity", kCoercivity, 1e-8));

  auto floor = make_check("nehari-floor", res[kFloor], 0.0, n);
  floor.note = "floor from the empirical embedding constant " + std::to_string(c_emb);
  rep.checks.push_back(floor);
  return rep;
}

}  // namespace sbp
