#include "sbp/fibering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sbp {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
// Agreement demanded between the system algebra and the closed forms.
constexpr double kDriftTol = 1e-10;

void check_p(double p) {
  if (!(p > 2.0 && p <= 3.0)) throw std::invalid_argument("p must lie in (2, 3]");
}

double h_of(const FiberCoeffs& c, double q2, double t) {
  return c.A + q2 * c.B * t * t - c.P * std::pow(t, c.p - 2.0);
}

// Bisection for a sign change of h on [lo, hi]; h(lo) and h(hi) must differ
// in sign. Runs until the bracket holds two adjacent doubles.
double bisect_h(const FiberCoeffs& c, double q2, double lo, double hi) {
  double flo = h_of(c, q2, lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = h_of(c, q2, mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double fl = std::abs(h_of(c, q2, lo));
  const double fh = std::abs(h_of(c, q2, hi));
  return fl <= fh ? lo : hi;
}

void check_drift(double system, double closed, const char* what) {
  if (!(std::abs(system - closed) <= kDriftTol * std::abs(closed))) {
    throw std::logic_error(std::string(what) + ": system algebra and closed form disagree");
  }
}

}  // namespace

void FiberCoeffs::validate() const {
  check_p(p);
  for (double v : {A, B, P}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("fiber coefficients must be finite and positive");
    }
  }
}

FiberCoeffs fiber_coeffs(const RadialFunction& u, const PotentialSolution& sol,
                         const ProblemParams& params) {
  if (u.is_zero()) throw std::invalid_argument("fiber of the zero function");
  require_same_grid(u, sol.phi);
  return FiberCoeffs{h1_norm_sq(u, params), sol.b_coupling, lp_norm_p(u, params.p),
                     params.p};
}

FiberCoeffs fiber_coeffs(const RadialFunction& u, const ProblemParams& params) {
  if (u.is_zero()) throw std::invalid_argument("fiber of the zero function");
  return fiber_coeffs(u, solve_potential(u, params), params);
}

double psi(const FiberCoeffs& c, double q, double t) {
  const double t2 = t * t;
  return 0.5 * c.A * t2 + 0.25 * q * q * c.B * t2 * t2 - c.P / c.p * std::pow(t, c.p);
}

double dpsi(const FiberCoeffs& c, double q, double t) {
  return t * h_of(c, q * q, t);
}

double d2psi(const FiberCoeffs& c, double q, double t) {
  return c.A + 3.0 * q * q * c.B * t * t - (c.p - 1.0) * c.P * std::pow(t, c.p - 2.0);
}

const char* to_string(FiberCase c) {
  switch (c) {
    case FiberCase::one: return "one";
    case FiberCase::two: return "two";
    case FiberCase::three: return "three";
  }
  return "?";
}

FiberConstants constants(double p) {
  check_p(p);
  const double e = (4.0 - p) / (2.0 * (p - 2.0));
  const double common = std::sqrt((p - 2.0) * std::numbers::pi) * std::pow(4.0 - p, e);
  FiberConstants k;
  k.c_p = 2.0 * common / std::pow(2.0, 1.0 / (p - 2.0));
  k.c_0p = std::pow(2.0, 1.5) * common / std::pow(p, 1.0 / (p - 2.0));
  if (!(k.c_0p < k.c_p)) throw std::logic_error("C_0p < C_p violated");
  return k;
}

double zero_energy_ratio(double p) {
  check_p(p);
  return std::sqrt(2.0) * std::pow(2.0 / p, 1.0 / (p - 2.0));
}

FiberPoint extremal_point(const FiberCoeffs& c) {
  c.validate();
  const double p = c.p;
  FiberPoint fp;
  fp.t = std::pow(2.0 * c.A / ((4.0 - p) * c.P), 1.0 / (p - 2.0));
  fp.q = std::sqrt(c.A * (p - 2.0) / ((4.0 - p) * c.B)) / fp.t;

  const double closed = constants(p).c_p * std::pow(c.P, 1.0 / (p - 2.0)) /
                        (std::pow(c.A, (4.0 - p) / (2.0 * (p - 2.0))) *
                         std::sqrt(kFourPi * c.B));
  check_drift(fp.q, closed, "q(u)");
  return fp;
}

FiberPoint zero_energy_point(const FiberCoeffs& c) {
  c.validate();
  const double p = c.p;
  FiberPoint fp;
  fp.t = std::pow(p * c.A / ((4.0 - p) * c.P), 1.0 / (p - 2.0));
  fp.q = std::sqrt(2.0 * (p - 2.0) * std::pow(fp.t, p - 4.0) * c.P / (p * c.B));

  const double closed = constants(p).c_0p * std::pow(c.P, 1.0 / (p - 2.0)) /
                        (std::pow(c.A, (4.0 - p) / (2.0 * (p - 2.0))) *
                         std::sqrt(kFourPi * c.B));
  check_drift(fp.q, closed, "q0(u)");
  return fp;
}

FiberingReport classify_fiber(const FiberCoeffs& c, double q, double band) {
  c.validate();
  if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument("q must be positive");
  const double p = c.p;
  const double q2 = q * q;

  FiberingReport rep;
  rep.q = q;
  const FiberPoint ext = extremal_point(c);
  const FiberPoint zero = zero_energy_point(c);
  rep.q_of_u = ext.q;
  rep.t_of_u = ext.t;
  rep.q0_of_u = zero.q;
  rep.t0_of_u = zero.t;

  rep.t_h = std::pow((p - 2.0) * c.P / (2.0 * q2 * c.B), 1.0 / (4.0 - p));
  rep.h_min = h_of(c, q2, rep.t_h);

  if (std::abs(rep.h_min) <= band * c.A) {
    rep.fiber_case = FiberCase::two;
    rep.t_inflect = rep.t_h;
    rep.psi_at_roots = {psi(c, q, rep.t_h)};
    return rep;
  }
  if (rep.h_min > 0.0) {
    rep.fiber_case = FiberCase::three;
    return rep;
  }

  rep.fiber_case = FiberCase::one;
  double hi = 2.0 * rep.t_h;
  while (h_of(c, q2, hi) <= 0.0) hi *= 2.0;
  rep.t_minus = bisect_h(c, q2, 0.0, rep.t_h);
  rep.t_plus = bisect_h(c, q2, rep.t_h, hi);
  rep.psi_at_roots = {psi(c, q, *rep.t_minus), psi(c, q, *rep.t_plus)};
  return rep;
}

double fiber_min(const FiberCoeffs& c, double q) {
  const auto rep = classify_fiber(c, q);
  if (rep.fiber_case != FiberCase::one) return 0.0;
  return std::min(0.0, psi(c, q, *rep.t_plus));
}

}  // namespace sbp
