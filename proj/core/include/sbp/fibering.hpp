#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sbp/potential.hpp"
#include "sbp/radial.hpp"

namespace sbp {

/// Coefficients of the fiber map
///
///   psi(t) = (A/2) t^2 + (q^2 B / 4) t^4 - (P/p) t^p
///
/// with A = ||u||^2, B = int phi_u u^2 and P = ||u||_p^p.
struct FiberCoeffs {
  double A = 0.0;
  double B = 0.0;
  double P = 0.0;
  double p = 2.5;

  /// Throws std::invalid_argument unless A, B, P are finite and positive and
  /// 2 < p <= 3.
  void validate() const;
};

/// Computes (A, B, P) for a nonzero u. Throws std::invalid_argument for u = 0.
FiberCoeffs fiber_coeffs(const RadialFunction& u, const ProblemParams& params);
FiberCoeffs fiber_coeffs(const RadialFunction& u, const PotentialSolution& sol,
                         const ProblemParams& params);

double psi(const FiberCoeffs& c, double q, double t);
double dpsi(const FiberCoeffs& c, double q, double t);
double d2psi(const FiberCoeffs& c, double q, double t);

/// Shape of t -> psi(t) on (0, inf):
///   one   - local max at t_minus and local min at t_plus,
///   two   - a single degenerate critical point (inflection) at t(u),
///   three - strictly increasing, no critical points.
enum class FiberCase { one, two, three };

const char* to_string(FiberCase c);

/// A degenerate critical point: the parameter value at which it occurs and
/// its location on the fiber.
struct FiberPoint {
  double q = 0.0;
  double t = 0.0;
};

/// q(u) and t(u): the charge for which psi' and psi'' vanish together.
FiberPoint extremal_point(const FiberCoeffs& c);
/// q0(u) and t0(u): the charge for which psi and psi' vanish together.
FiberPoint zero_energy_point(const FiberCoeffs& c);

inline double q_of_u(const FiberCoeffs& c) { return extremal_point(c).q; }
inline double t_of_u(const FiberCoeffs& c) { return extremal_point(c).t; }
inline double q0_of_u(const FiberCoeffs& c) { return zero_energy_point(c).q; }
inline double t0_of_u(const FiberCoeffs& c) { return zero_energy_point(c).t; }

struct FiberConstants {
  double c_p = 0.0;
  double c_0p = 0.0;
};

/// The closed-form constants C_p and C_{0,p}; p in (2, 3] or
/// std::invalid_argument.
FiberConstants constants(double p);

/// q0(u) / q(u), which does not depend on u.
double zero_energy_ratio(double p);

struct FiberingReport {
  FiberCase fiber_case = FiberCase::three;
  double q = 0.0;
  /// Minimizer of h(t) = psi'(t) / t.
  double t_h = 0.0;
  double h_min = 0.0;
  std::optional<double> t_minus;
  std::optional<double> t_plus;
  std::optional<double> t_inflect;
  double q_of_u = 0.0;
  double q0_of_u = 0.0;
  double t_of_u = 0.0;
  double t0_of_u = 0.0;
  /// psi at t_minus and t_plus (case one) or at t_inflect (case two).
  std::vector<double> psi_at_roots;
};

/// Relative width of the band |h(t_h)| <= band * A that is classified as a
/// double root.
inline constexpr double default_case_band = 1e-8;

/// Classifies the fiber at charge q > 0 and locates its critical points by
/// bisection on the two monotone branches of h(t) = A + q^2 B t^2 - P t^{p-2}.
FiberingReport classify_fiber(const FiberCoeffs& c, double q,
                              double band = default_case_band);

/// Minimum of psi over t > 0: psi(t_plus) in case one, otherwise 0 (attained
/// as t -> 0).
double fiber_min(const FiberCoeffs& c, double q);

}  // namespace sbp
