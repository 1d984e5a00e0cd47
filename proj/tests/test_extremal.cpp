#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sbp/extremal.hpp"
#include "sbp/profiles.hpp"

using namespace sbp;

namespace {

const GridPtr& grid() {
  static const GridPtr g = make_grid();
  return g;
}

// q(u) straight from the two-equation system psi' = psi'' = 0.
double q_closed_form(const FiberCoeffs& c) {
  const double t = std::pow(2.0 * c.A / ((4.0 - c.p) * c.P), 1.0 / (c.p - 2.0));
  return std::sqrt(c.A * (c.p - 2.0) / ((4.0 - c.p) * c.B)) / t;
}

double log_spaced(double lo, double hi, std::size_t i, std::size_t m) {
  return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (m - 1));
}

}  // namespace

TEST_CASE("gaussian family scan matches a direct scan") {
  const ProblemParams pp{3.0, 1.0, 1.0};
  SearchConfig cfg;
  cfg.exponential_family = false;
  cfg.ascent_iterations = 0;
  cfg.family_points = 25;
  const auto est = estimate_extremals(grid(), pp, cfg);

  double best = 0.0;
  for (std::size_t i = 0; i < cfg.family_points; ++i) {
    const double alpha = log_spaced(cfg.gauss_alpha_min, cfg.gauss_alpha_max, i, cfg.family_points);
    best = std::max(best, q_closed_form(fiber_coeffs(gaussian_profile(grid(), alpha), pp)));
  }
  CHECK(std::abs(est.q_star_lb - best) <= 1e-12 * best);
  CHECK(est.family_tag == "gaussian");

  const auto again = estimate_extremals(grid(), pp, cfg);
  CHECK(again.q_star_lb == est.q_star_lb);
  CHECK(again.q0_star_lb == est.q0_star_lb);
}

TEST_CASE("trial values do not depend on the amplitude") {
  const ProblemParams pp{2.5, 1.0, 1.0};
  for (double alpha : {0.05, 0.3, 2.0}) {
    const auto u = gaussian_profile(grid(), alpha);
    const auto e = exponential_profile(grid(), alpha);
    const double qu = q_of_u(fiber_coeffs(u, pp));
    const double qe = q_of_u(fiber_coeffs(e, pp));
    CHECK(std::abs(q_of_u(fiber_coeffs(7.0 * u, pp)) - qu) <= 1e-12 * qu);
    CHECK(std::abs(q_of_u(fiber_coeffs(7.0 * e, pp)) - qe) <= 1e-12 * qe);
    CHECK(std::abs(q_of_u(fiber_coeffs(gaussian_profile(grid(), alpha, 7.0), pp)) - qu) <= 1e-12 * qu);
  }
  const auto est = estimate_extremals(grid(), pp);
  const double q7 = q_of_u(fiber_coeffs(7.0 * est.maximizer, pp));
  CHECK(std::abs(q7 - est.q_star_lb) <= 1e-12 * est.q_star_lb);
}

TEST_CASE("extremal estimate invariants") {
  for (double p : {2.2, 2.5, 3.0}) {
    CAPTURE(p);
    const ProblemParams pp{p, 1.0, 1.0};
    const auto est = estimate_extremals(grid(), pp);
    const double ratio = std::sqrt(2.0) * std::pow(2.0 / p, 1.0 / (p - 2.0));
    CHECK(std::abs(est.q0_star_lb / est.q_star_lb - ratio) <= 1e-12 * ratio);
    CHECK(est.q_star_lb <= q_of_u(fiber_coeffs(est.maximizer, pp)) + 1e-10);
    CHECK(est.q_star_lb >= est.family_best);
    CHECK(std::abs(h1_norm_sq(est.maximizer, pp) - 1.0) < 1e-12);
    if (p == 3.0) CHECK(std::abs(est.q0_star_lb / est.q_star_lb - 2.0 * std::sqrt(2.0) / 3.0) <= 1e-12);
  }
}

TEST_CASE("extremal search is deterministic across job counts") {
  const ProblemParams pp{2.5, 1.0, 1.0};
  SearchConfig one, four;
  four.jobs = 4;
  const auto a = estimate_extremals(grid(), pp, one);
  const auto b = estimate_extremals(grid(), pp, four);
  CHECK(a.q_star_lb == b.q_star_lb);
  CHECK(a.iterations == b.iterations);
  for (std::size_t i = 0; i < a.maximizer.size(); ++i) REQUIRE(a.maximizer[i] == b.maximizer[i]);
}

TEST_CASE("embedding constant bounds the trial families") {
  const ProblemParams pp{2.5, 1.0, 1.0};
  const double c = estimate_embedding_constant(grid(), pp);
  for (double alpha : {0.01, 0.1, 1.0, 10.0}) {
    const auto f = fiber_coeffs(gaussian_profile(grid(), alpha), pp);
    CHECK(f.P / std::pow(f.A, 0.5 * pp.p) <= c * (1.0 + 1e-12));
  }
}

TEST_CASE("per-profile certificates") {
  const ProblemParams pp{2.5, 1.0, 1.0};
  const auto est = estimate_extremals(grid(), pp);

  const auto high = per_u_certificates(grid(), pp, 2.0 * est.q_star_lb, 100, 11, 4);
  CHECK(high.samples == 100);
  CHECK(high.violations == 0);
  CHECK(high.above == 100);

  const auto low = per_u_certificates(grid(), pp, 0.1 * est.q0_star_lb, 100, 11);
  CHECK(low.violations == 0);
  CHECK(low.below == 100);

  // A q placed exactly on one sample's q(u) sits inside the band.
  ProfileSampler sampler(11);
  const auto c = fiber_coeffs(sampler.next(grid()), pp);
  CHECK(classify_fiber(c, q_of_u(c)).fiber_case == FiberCase::two);

  CHECK_THROWS_AS(per_u_certificates(grid(), pp, 0.0, 10, 1), std::invalid_argument);
}

TEST_CASE("sign structure at the zero-energy estimate") {
  const ProblemParams pp{2.5, 1.0, 1.0};
  const auto est = estimate_extremals(grid(), pp);
  ProfileSampler sampler(5);
  for (int k = 0; k < 100; ++k) {
    const auto c = fiber_coeffs(sampler.next(grid()), pp);
    CHECK(fiber_min(c, est.q0_star_lb) >= -1e-8 * c.A);
  }
  const auto m = fiber_coeffs(est.maximizer, pp);
  CHECK(fiber_min(m, 0.99 * est.q0_star_lb) < 0.0);
}

TEST_CASE("search configuration is validated") {
  SearchConfig cfg;
  cfg.family_points = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SearchConfig{};
  cfg.gauss_alpha_min = -1.0;
  CHECK_THROWS_AS(estimate_extremals(grid(), ProblemParams{}, cfg), std::invalid_argument);
}
