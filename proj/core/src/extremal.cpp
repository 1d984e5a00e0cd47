#include "sbp/extremal.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lbfgs.hpp"
#include "parallel.hpp"
#include "sbp/profiles.hpp"

namespace sbp {

namespace {

// A zero-homogeneous functional maximized through its logarithm.
struct LogFunctional {
  std::function<double(const FiberCoeffs&)> value;
  std::function<void(const FunctionalParts&, std::vector<double>&)> gradient;
};

LogFunctional log_q(double p) {
  const double ka = (4.0 - p) / (2.0 * (p - 2.0));
  const double kp = 1.0 / (p - 2.0);
  return {
      [](const FiberCoeffs& c) { return std::log(extremal_point(c).q); },
      [=](const FunctionalParts& fp, std::vector<double>& g) {
        const auto& c = fp.coeffs;
        g.resize(fp.grad_a.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
          g[i] = kp * fp.grad_p[i] / c.P - ka * fp.grad_a[i] / c.A - 0.5 * fp.grad_b[i] / c.B;
        }
      }};
}

LogFunctional log_embedding(double p) {
  return {
      [p](const FiberCoeffs& c) { return std::log(c.P) - 0.5 * p * std::log(c.A); },
      [p](const FunctionalParts& fp, std::vector<double>& g) {
        const auto& c = fp.coeffs;
        g.resize(fp.grad_a.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
          g[i] = fp.grad_p[i] / c.P - 0.5 * p * fp.grad_a[i] / c.A;
        }
      }};
}

bool usable(const FiberCoeffs& c) {
  return c.A > 0.0 && c.B > 0.0 && c.P > 0.0 && std::isfinite(c.A) && std::isfinite(c.B) &&
         std::isfinite(c.P);
}

struct Maximum {
  double log_value = -std::numeric_limits<double>::infinity();
  std::vector<double> x;
  std::string family;
  std::string seed_family;
  double seed_alpha = 0.0;
  double family_best = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

Maximum maximize(const EnergyModel& model, const SearchConfig& cfg, const LogFunctional& fn) {
  cfg.validate();
  const auto& grid = model.grid();
  const double omega = model.params().omega;

  struct Trial {
    const char* family;
    double alpha;
    double value;
  };
  std::vector<Trial> trials;
  const std::size_t m = cfg.family_points;
  auto log_spaced = [m](double lo, double hi, std::size_t i) {
    if (m == 1) return std::sqrt(lo * hi);
    return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (m - 1));
  };
  for (std::size_t i = 0; i < m; ++i) {
    trials.push_back({"gaussian", log_spaced(cfg.gauss_alpha_min, cfg.gauss_alpha_max, i), 0.0});
  }
  for (std::size_t i = 0; cfg.exponential_family && i < m; ++i) {
    trials.push_back({"exponential", log_spaced(cfg.exp_alpha_min, cfg.exp_alpha_max, i), 0.0});
  }
  auto make = [&](const Trial& t) {
    return t.family[0] == 'g' ? gaussian_profile(grid, t.alpha) : exponential_profile(grid, t.alpha);
  };
  detail::parallel_for(trials.size(), cfg.jobs, [&](std::size_t i) {
    const auto c = model.parts(make(trials[i]), false).coeffs;
    trials[i].value = usable(c) ? fn.value(c) : -std::numeric_limits<double>::infinity();
    if (!std::isfinite(trials[i].value)) trials[i].value = -std::numeric_limits<double>::infinity();
  });

  Maximum best;
  const Trial* winner = nullptr;
  for (const auto& t : trials) {
    if (t.value > best.log_value) {
      best.log_value = t.value;
      winner = &t;
    }
  }
  if (!winner) throw std::runtime_error("extremal search: no trial function gave a finite value");
  best.family = best.seed_family = winner->family;
  best.seed_alpha = winner->alpha;
  best.family_best = best.log_value;
  auto seed = make(*winner);
  seed *= 1.0 / std::sqrt(h1_norm_sq(seed, model.params()));
  best.x.assign(seed.values().begin(), seed.values().end());
  if (cfg.ascent_iterations <= 0) return best;

  detail::Objective obj = [&](const std::vector<double>& x, double& f, std::vector<double>& g) {
    const auto fp = model.parts(RadialFunction(grid, x), true);
    if (!usable(fp.coeffs)) return false;
    f = -fn.value(fp.coeffs);
    fn.gradient(fp, g);
    for (double& v : g) v = -v;
    return std::isfinite(f);
  };
  detail::Preconditioner pre = [&](const std::vector<double>& g) {
    return solve_h1(*grid, g, omega);
  };
  detail::Normalizer norm = [&](const std::vector<double>& x) {
    return 1.0 / std::sqrt(detail::dotv(x, apply_h1(*grid, x, omega)));
  };
  detail::LbfgsOptions opt;
  opt.max_iter = cfg.ascent_iterations;
  opt.gtol = cfg.ascent_tol;
  opt.zero_homogeneous = true;
  const auto res = detail::lbfgs_minimize(best.x, obj, pre, opt, {}, norm);
  best.iterations = res.iterations;
  best.converged = res.stop == detail::LbfgsStop::converged;
  if (std::isfinite(res.f) && -res.f > best.log_value) {
    best.log_value = -res.f;
    best.x = res.x;
    best.family = "free-ascent";
  }
  const double c = norm(best.x);
  for (double& v : best.x) v *= c;
  return best;
}

}  // namespace

void SearchConfig::validate() const {
  if (family_points == 0) throw std::invalid_argument("family_points must be positive");
  if (!(gauss_alpha_min > 0.0 && gauss_alpha_max >= gauss_alpha_min) ||
      !(exp_alpha_min > 0.0 && exp_alpha_max >= exp_alpha_min)) {
    throw std::invalid_argument("family width ranges must be positive and ordered");
  }
  if (ascent_iterations < 0) throw std::invalid_argument("ascent_iterations must be >= 0");
  if (!(ascent_tol > 0.0)) throw std::invalid_argument("ascent_tol must be positive");
}

ExtremalEstimate estimate_extremals(const GridPtr& grid, const ProblemParams& params,
                                    const SearchConfig& search) {
  params.validate();
  EnergyModel model(grid, params);
  const auto best = maximize(model, search, log_q(params.p));

  ExtremalEstimate est;
  est.maximizer = RadialFunction(grid, best.x);
  const auto c = model.parts(est.maximizer, false).coeffs;
  est.q_star_lb = q_of_u(c);
  est.q0_star_lb = zero_energy_ratio(params.p) * est.q_star_lb;
  est.family_tag = best.family;
  est.seed_family = best.seed_family;
  est.seed_alpha = best.seed_alpha;
  est.family_best = std::exp(best.family_best);
  est.iterations = best.iterations;
  est.converged = best.converged;
  return est;
}

double estimate_embedding_constant(const GridPtr& grid, const ProblemParams& params,
                                   const SearchConfig& search) {
  params.validate();
  EnergyModel model(grid, params);
  const auto best = maximize(model, search, log_embedding(params.p));
  const auto c = model.parts(RadialFunction(grid, best.x), false).coeffs;
  return c.P / std::pow(c.A, 0.5 * params.p);
}

CertificateReport per_u_certificates(const GridPtr& grid, const ProblemParams& params,
                                     double q, std::size_t samples, std::uint64_t seed,
                                     unsigned jobs) {
  if (!(q > 0.0)) throw std::invalid_argument("q must be positive");
  params.validate();
  EnergyModel model(grid, params);
  ProfileSampler sampler(seed);
  std::vector<RadialFunction> profiles;
  profiles.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) profiles.push_back(sampler.next(grid));

  struct Outcome {
    double qu;
    FiberCase got;
  };
  std::vector<Outcome> out(samples);
  detail::parallel_for(samples, jobs, [&](std::size_t i) {
    const auto c = model.parts(profiles[i], false).coeffs;
    out[i] = {q_of_u(c), classify_fiber(c, q).fiber_case};
  });

  CertificateReport rep;
  rep.q = q;
  rep.samples = samples;
  // The classifier's band on h(t_h) / A corresponds to this band on q / q(u).
  const double e = 2.0 * (params.p - 2.0) / (4.0 - params.p);
  for (const auto& o : out) {
    FiberCase expect;
    if (std::abs(1.0 - std::pow(o.qu / q, e)) <= default_case_band) {
      ++rep.at;
      expect = FiberCase::two;
    } else if (q > o.qu) {
      ++rep.above;
      expect = FiberCase::three;
    } else {
      ++rep.below;
      expect = FiberCase::one;
    }
    if (o.got != expect) ++rep.violations;
    rep.max_ratio = std::max(rep.max_ratio, o.qu / q);
  }
  return rep;
}

}  // namespace sbp
