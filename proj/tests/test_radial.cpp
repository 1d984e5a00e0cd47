#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oracles.hpp"
#include "sbp/radial.hpp"

using namespace sbp;

namespace {

RadialFunction gaussian(const GridPtr& g, double alpha = 1.0) {
  return RadialFunction::sample(g, [alpha](double r) { return std::exp(-alpha * r * r); });
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("grid construction and volume") {
  for (auto scheme : {GridScheme::graded, GridScheme::uniform}) {
    for (std::size_t n : {16u, 64u, 257u, 2048u}) {
      auto g = make_grid(1.0, n, scheme);
      double vol = 0.0;
      for (double w : g->weights()) {
        CHECK(w >= 0.0);
        vol += w;
      }
      CHECK(rel(vol, 4.0 * oracle::pi / 3.0) < 1e-10);
      for (std::size_t i = 1; i < g->size(); ++i) CHECK(g->r()[i] > g->r()[i - 1]);
      CHECK(g->r()[0] == 0.0);
      CHECK(g->r()[n - 1] == 1.0);
    }
  }
  auto g = make_grid(40.0, 2048);
  double vol = 0.0;
  for (double w : g->weights()) vol += w;
  CHECK(rel(vol, 4.0 * oracle::pi / 3.0 * 64000.0) < 1e-10);
}

TEST_CASE("grid rejects bad arguments") {
  CHECK_THROWS_AS(make_grid(0.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(-1.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1.0, 15), std::invalid_argument);
  CHECK_THROWS_AS(grid_scheme_from_string("chebyshev"), std::invalid_argument);
  CHECK(grid_scheme_from_string("uniform") == GridScheme::uniform);
}

TEST_CASE("problem parameter validation") {
  ProblemParams ok;
  CHECK_NOTHROW(ok.validate());
  CHECK_THROWS_AS((ProblemParams{2.0, 1.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ProblemParams{3.1, 1.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ProblemParams{2.5, -1.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ProblemParams{2.5, 1.0, 0.0}.validate()), std::invalid_argument);
  CHECK_NOTHROW((ProblemParams{3.0, 0.0, 0.5}.validate()));
}

TEST_CASE("gaussian integrals on the default grid") {
  auto g = make_grid();
  auto u = gaussian(g);
  const double l2 = std::pow(oracle::pi, 1.5) / (2.0 * std::sqrt(2.0));
  CHECK(std::abs(l2_inner(u, u) - l2) < 1e-8);
  CHECK(rel(gradient_norm_sq(u), 3.0 * l2) < 1e-5);
  CHECK(rel(h1_norm_sq(u, ProblemParams{}), 4.0 * l2) < 1e-5);
  CHECK(std::abs(lp_norm_p(u, 3.0) - std::pow(oracle::pi / 3.0, 1.5)) < 1e-8);
}

TEST_CASE("quadrature integrates polynomials in r^2 to round-off") {
  auto g = make_grid(2.0, 200, GridScheme::uniform);
  for (int k = 0; k <= 2; ++k) {
    auto f = RadialFunction::sample(g, [k](double r) { return std::pow(r * r, k); });
    const double exact = 4.0 * oracle::pi * std::pow(2.0, 2 * k + 3) / (2 * k + 3);
    CHECK(rel(integrate(f), exact) < 1e-11);
  }
}

TEST_CASE("norm homogeneity and zero function") {
  auto g = make_grid(20.0, 512);
  auto u = RadialFunction::sample(g, [](double r) { return (1.0 + r) * std::exp(-r); });
  ProblemParams pp{2.5, 1.0, 0.7};
  CHECK(h1_norm_sq(RadialFunction(g), pp) == 0.0);
  CHECK(lp_norm_p(RadialFunction(g), 2.5) == 0.0);
  CHECK(rel(h1_norm_sq(2.0 * u, pp), 4.0 * h1_norm_sq(u, pp)) < 1e-12);
  CHECK(rel(lp_norm_p(1.7 * u, 2.5), std::pow(1.7, 2.5) * lp_norm_p(u, 2.5)) < 1e-12);
  CHECK_THROWS_AS(lp_norm_p(u, 1.0), std::invalid_argument);
}

TEST_CASE("refinement reduces the gradient error") {
  const double exact = 3.0 * std::pow(oracle::pi, 1.5) / (2.0 * std::sqrt(2.0));
  double prev = 1.0;
  for (std::size_t n : {256u, 512u, 1024u, 2048u}) {
    const double err = rel(gradient_norm_sq(gaussian(make_grid(40.0, n))), exact);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("h1 operator solve inverts apply") {
  auto g = make_grid(30.0, 300);
  auto u = RadialFunction::sample(g, [](double r) { return std::exp(-0.3 * r) * std::cos(r); });
  const auto mu = apply_h1(*g, u.values(), 1.3);
  const auto back = solve_h1(*g, mu, 1.3);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(back[i] == doctest::Approx(u[i]).epsilon(1e-9));
  double quad = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) quad += u[i] * mu[i];
  CHECK(rel(quad, h1_norm_sq(u, ProblemParams{2.5, 1.0, 1.3})) < 1e-12);
}

TEST_CASE("binary operations require a common grid") {
  auto u = gaussian(make_grid(10.0, 64));
  auto v = gaussian(make_grid(10.0, 65));
  CHECK_THROWS_AS(u += v, std::invalid_argument);
  CHECK_THROWS_AS(l2_inner(u, v), std::invalid_argument);
  auto w = gaussian(make_grid(10.0, 64));
  CHECK_NOTHROW(u += w);
}
