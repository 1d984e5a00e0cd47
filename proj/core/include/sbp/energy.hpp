#pragma once

#include <vector>

#include "sbp/fibering.hpp"
#include "sbp/potential.hpp"
#include "sbp/radial.hpp"

namespace sbp {

struct EnergyBreakdown {
  double quad = 0.0;      // ||u||^2 / 2
  double nonlocal = 0.0;  // (q^2 / 4) int phi_u u^2
  double power = 0.0;     // ||u||_p^p / p
  double total = 0.0;
  double q = 0.0;
};

/// A, B, P of u and, optionally, their gradients with respect to the nodal
/// values (dual vectors, so that dA . v is the directional derivative).
struct FunctionalParts {
  FiberCoeffs coeffs;
  std::vector<double> phi;
  std::vector<double> grad_a;  // 2 M u
  std::vector<double> grad_b;  // exact derivative of the discrete B
  std::vector<double> grad_p;  // p W |u|^{p-2} u
};

enum class NehariClass { plus, zero, minus, off };

const char* to_string(NehariClass c);

struct NehariReport {
  NehariClass cls = NehariClass::off;
  double dpsi1 = 0.0;
  double d2psi1 = 0.0;
};

inline constexpr double default_nehari_tol = 1e-8;

/// Energy
///
///   J_q(u) = ||u||^2 / 2 + (q^2 / 4) int phi_u u^2 - ||u||_p^p / p
///
/// on one grid. The discrete functional is a function of the nodal values and
/// gradient() is its exact derivative.
class EnergyModel {
public:
  EnergyModel(GridPtr grid, ProblemParams params);

  const GridPtr& grid() const { return grid_; }
  const ProblemParams& params() const { return params_; }
  const PotentialOperator& potential() const { return potential_; }

  FunctionalParts parts(const RadialFunction& u, bool with_gradients) const;

  EnergyBreakdown energy(const RadialFunction& u, double q) const;
  static EnergyBreakdown energy_from(const FiberCoeffs& c, double q);

  /// Weak gradient dJ = M u + q^2 W phi u - W |u|^{p-2} u.
  std::vector<double> gradient(const RadialFunction& u, double q) const;
  static std::vector<double> gradient_from(const FunctionalParts& parts, double q);

  /// Pointwise -u'' - (2/r) u' + omega u + q^2 phi u - |u|^{p-2} u.
  RadialFunction euler_residual(const RadialFunction& u, double q) const;
  /// Weighted L2 norm of the Euler residual.
  double residual_l2(const RadialFunction& u, double q) const;

  /// g with (-Delta + omega) g = residual, i.e. M g = dJ.
  RadialFunction sobolev_gradient(const RadialFunction& u, double q) const;
  /// ||g||_{H^1} for the Sobolev gradient of the weak gradient dj.
  double stationarity(const std::vector<double>& dj) const;

  NehariReport nehari_classify(const RadialFunction& u, double q,
                               double tol = default_nehari_tol) const;
  static NehariReport nehari_classify(const FiberCoeffs& c, double q,
                                      double tol = default_nehari_tol);

private:
  GridPtr grid_;
  ProblemParams params_;
  PotentialOperator potential_;
};

EnergyBreakdown energy(const RadialFunction& u, double q, const ProblemParams& params);
RadialFunction euler_residual(const RadialFunction& u, double q, const ProblemParams& params);
RadialFunction sobolev_gradient(const RadialFunction& u, double q, const ProblemParams& params);
/// Throws std::invalid_argument for u = 0.
NehariReport nehari_classify(const RadialFunction& u, double q, const ProblemParams& params,
                             double tol = default_nehari_tol);

/// Empirical Nehari-set constants derived from an embedding constant
/// C_emb >= sup ||u||_p^p / ||u||^p: the floor C~ = C_emb^{-1/(p-2)}, the
/// sphere radius rho and the barrier M = rho^2 / 2 - (C_emb / p) rho^p.
/// Diagnostics only; they inherit whatever error C_emb carries.
struct NehariGeometry {
  double c_emb = 0.0;
  double c_tilde = 0.0;
  double rho = 0.0;
  double barrier = 0.0;
};

inline constexpr double default_rho_fraction = 0.5;

NehariGeometry nehari_geometry(double c_emb, double p,
                               double rho_fraction = default_rho_fraction);

}  // namespace sbp
