#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "sbp/fibering.hpp"

using namespace sbp;

namespace {

const FiberCoeffs kUnit{1.0, 1.0, 1.0, 3.0};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

FiberCoeffs random_triple(std::mt19937_64& rng, double p) {
  std::uniform_real_distribution<double> e(-2.0, 2.0);
  return FiberCoeffs{std::exp(e(rng)), std::exp(e(rng)), std::exp(e(rng)), p};
}

// Dense-sample minimum of psi over (0, t_max].
double dense_min(const FiberCoeffs& c, double q, double t_max, int n = 200000) {
  double m = 0.0;
  for (int i = 1; i <= n; ++i) m = std::min(m, psi(c, q, t_max * i / n));
  return m;
}

}  // namespace

TEST_CASE("unit triple closed forms") {
  const auto ext = extremal_point(kUnit);
  CHECK(std::abs(ext.t - 2.0) < 1e-12);
  CHECK(std::abs(ext.q - 0.5) < 1e-12);
  const auto zero = zero_energy_point(kUnit);
  CHECK(std::abs(zero.t - 3.0) < 1e-12);
  CHECK(std::abs(zero.q - std::sqrt(2.0) / 3.0) < 1e-12);
  CHECK(std::abs(dpsi(kUnit, 0.5, 2.0)) < 1e-12);
  CHECK(std::abs(d2psi(kUnit, 0.5, 2.0)) < 1e-12);
  CHECK(std::abs(psi(kUnit, zero.q, 3.0)) < 1e-10);
  CHECK(std::abs(dpsi(kUnit, zero.q, 3.0)) < 1e-10);
}

TEST_CASE("classification of the unit triple") {
  const auto one = classify_fiber(kUnit, 0.4);
  REQUIRE(one.fiber_case == FiberCase::one);
  CHECK(*one.t_minus == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(*one.t_plus == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(d2psi(kUnit, 0.4, *one.t_minus) < 0.0);
  CHECK(d2psi(kUnit, 0.4, *one.t_plus) > 0.0);
  CHECK(*one.t_minus < one.t_h);
  CHECK(one.t_h < *one.t_plus);

  const auto two = classify_fiber(kUnit, 0.5);
  REQUIRE(two.fiber_case == FiberCase::two);
  CHECK(*two.t_inflect == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(!two.t_minus);

  const auto three = classify_fiber(kUnit, 0.6);
  CHECK(three.fiber_case == FiberCase::three);
  CHECK(!three.t_plus);
  CHECK(three.psi_at_roots.empty());
}

TEST_CASE("constants") {
  const auto k3 = constants(3.0);
  CHECK(k3.c_p == doctest::Approx(std::sqrt(oracle::pi)).epsilon(1e-14));
  CHECK(k3.c_0p == doctest::Approx(2.0 * std::sqrt(2.0) / 3.0 * std::sqrt(oracle::pi)).epsilon(1e-14));
  for (double p : {2.2, 2.5, 3.0}) {
    const auto k = constants(p);
    CHECK(k.c_0p < k.c_p);
    CHECK(rel(k.c_0p / k.c_p, std::sqrt(2.0) * std::pow(2.0 / p, 1.0 / (p - 2.0))) < 1e-12);
  }
  CHECK(zero_energy_ratio(3.0) == doctest::Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(constants(2.0), std::invalid_argument);
  CHECK_THROWS_AS(constants(3.5), std::invalid_argument);
}

TEST_CASE("degenerate coefficients are rejected") {
  CHECK_THROWS_AS(extremal_point(FiberCoeffs{0.0, 1.0, 1.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(zero_energy_point(FiberCoeffs{1.0, 0.0, 1.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(classify_fiber(kUnit, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(classify_fiber(FiberCoeffs{1.0, 1.0, NAN, 2.5}, 0.1), std::invalid_argument);
}

TEST_CASE("ratio and printed forms on random triples") {
  std::mt19937_64 rng(11);
  for (double p : {2.2, 2.5, 3.0}) {
    for (int k = 0; k < 50; ++k) {
      const auto c = random_triple(rng, p);
      const auto e = extremal_point(c);
      const auto z = zero_energy_point(c);
      CHECK(z.q < e.q);
      CHECK(rel(z.q / e.q, zero_energy_ratio(p)) < 1e-12);
      // Independent evaluation of the printed closed forms.
      const double e4 = (4.0 - p) / (2.0 * (p - 2.0));
      const double norm_d = std::sqrt(4.0 * oracle::pi * c.B);
      const double shape = std::pow(c.P, 1.0 / (p - 2.0)) / (std::pow(c.A, e4) * norm_d);
      const double cp = 2.0 * std::sqrt(p - 2.0) * std::sqrt(oracle::pi) *
                        std::pow(4.0 - p, e4) / std::pow(2.0, 1.0 / (p - 2.0));
      const double c0p = std::pow(2.0, 1.5) * std::sqrt(p - 2.0) * std::sqrt(oracle::pi) *
                         std::pow(4.0 - p, e4) / std::pow(p, 1.0 / (p - 2.0));
      CHECK(rel(e.q, cp * shape) < 1e-12);
      CHECK(rel(z.q, c0p * shape) < 1e-12);
      CHECK(std::abs(dpsi(c, e.q, e.t)) < 1e-10 * c.A * e.t);
      CHECK(std::abs(d2psi(c, e.q, e.t)) < 1e-10 * c.A);
      CHECK(std::abs(psi(c, z.q, z.t)) < 1e-10 * c.A * z.t * z.t);
      CHECK(std::abs(dpsi(c, z.q, z.t)) < 1e-10 * c.A * z.t);
    }
  }
}

TEST_CASE("homogeneity of q(u) and q0(u) in the coefficients") {
  const FiberCoeffs c{2.3, 0.7, 1.9, 2.5};
  for (double s : {0.01, 0.5, 7.0, 300.0}) {
    const FiberCoeffs cs{s * s * c.A, std::pow(s, 4) * c.B, std::pow(s, c.p) * c.P, c.p};
    CHECK(rel(q_of_u(cs), q_of_u(c)) < 1e-12);
    CHECK(rel(q0_of_u(cs), q0_of_u(c)) < 1e-12);
    CHECK(rel(t_of_u(cs) * s, t_of_u(c)) < 1e-12);
  }
}

TEST_CASE("consistency: classifying at q(u) finds the inflection") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const auto c = random_triple(rng, 2.5);
    const auto e = extremal_point(c);
    const auto rep = classify_fiber(c, e.q);
    REQUIRE(rep.fiber_case == FiberCase::two);
    CHECK(rel(*rep.t_inflect, e.t) < 1e-12);
  }
}

TEST_CASE("case monotonicity and zero-energy threshold along q sweeps") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 20; ++k) {
    const double p = 2.2 + 0.8 * k / 19.0;
    const auto c = random_triple(rng, p);
    const double qu = q_of_u(c);
    const double q0 = q0_of_u(c);
    for (int i = 0; i < 100; ++i) {
      const double q = qu * (0.02 + 1.98 * i / 99.0);
      const auto rep = classify_fiber(c, q);
      if (std::abs(q - qu) <= 1e-9 * qu) {
        CHECK(rep.fiber_case == FiberCase::two);
      } else if (q < qu) {
        CHECK(rep.fiber_case == FiberCase::one);
      } else {
        CHECK(rep.fiber_case == FiberCase::three);
      }
      const double m = fiber_min(c, q);
      if (q < q0 * (1.0 - 1e-8)) CHECK(m < 0.0);
      if (q > q0 * (1.0 + 1e-8)) CHECK(m >= -1e-10);
    }
  }
}

TEST_CASE("bisection roots agree with dense sampling of psi") {
  std::mt19937_64 rng(8);
  int tested = 0;
  while (tested < 50) {
    const auto c = random_triple(rng, 2.5);
    std::uniform_real_distribution<double> f(0.1, 0.95);
    const double q = f(rng) * q_of_u(c);
    const auto rep = classify_fiber(c, q);
    REQUIRE(rep.fiber_case == FiberCase::one);
    const double t_max = 2.0 * *rep.t_plus;
    const int n = 400000;
    double best_min = 1e300, arg_min = 0.0, best_max = -1e300, arg_max = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double t = t_max * i / n;
      const double v = psi(c, q, t);
      if (t > rep.t_h && v < best_min) { best_min = v; arg_min = t; }
      if (t < rep.t_h && v > best_max) { best_max = v; arg_max = t; }
    }
    CHECK(std::abs(arg_min - *rep.t_plus) < 1e-6 * t_max + 2.0 * t_max / n);
    CHECK(std::abs(arg_max - *rep.t_minus) < 1e-6 * t_max + 2.0 * t_max / n);
    CHECK(dense_min(c, q, t_max, 1000) >= fiber_min(c, q) - 1e-12 * c.A);
    ++tested;
  }
}
