#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sbp/check.hpp"
#include "sbp/radial.hpp"

namespace sbp {

/// phi_u solving -Delta phi + a^2 Delta^2 phi = 4 pi u^2, with derived norms.
struct PotentialSolution {
  RadialFunction phi;
  RadialFunction lap_phi;
  /// d phi / dr at the nodes.
  RadialFunction dphi;
  /// Integral of phi_u u^2.
  double b_coupling = 0.0;
  /// a^2 ||Delta phi||_2^2 + ||grad phi||_2^2 over all of R^3.
  double d_norm_sq = 0.0;
};

/// Reusable solver for one grid and one Bopp-Podolsky length.
///
/// For a > 0 the kernel (1 - e^{-r/a}) / r is split into the Coulomb part 1/r
/// and the Yukawa part e^{-mu r} / r with mu = 1/a. Their radial reductions are
///
///   phi_C(r) = 4 pi [ (1/r) int_0^r f s^2 ds + int_r^inf f s ds ]
///   phi_Y(r) = 4 pi / (mu r) [ e^{-mu r} int_0^r f s sinh(mu s) ds
///                              + sinh(mu r) int_r^inf f s e^{-mu s} ds ]
///
/// with f = u^2. The Yukawa integrals are carried in the scaled forms
/// e^{-mu r} int_0^r (...) and e^{mu r} int_r^inf (...), so every recurrence
/// step multiplies by e^{-mu dr} <= 1 and nothing overflows. Panel integrals use
/// Gauss-Legendre in an exponentially fitted variable, which stays exact in
/// the kernel when mu dr is large (small a). u is interpolated with six-point
/// Lagrange stencils in the grid parameter, mirrored at the origin.
///
/// Delta phi = -mu^2 phi_Y for a > 0 and -4 pi u^2 for a = 0. The D-norm adds
/// the closed-form exterior contribution for r > r_max, where u is zero.
class PotentialOperator {
public:
  /// kernel_scale multiplies the kernel; anything but 1 is a fault-injection
  /// knob for testing the identity checks.
  PotentialOperator(GridPtr grid, double a, double kernel_scale = 1.0);

  PotentialSolution solve(const RadialFunction& u) const;
  /// Only the nodal phi_u, skipping derivatives and norms.
  std::vector<double> phi_values(const RadialFunction& u) const;

  /// The discrete coupling B(u) = sum_i w_i phi_i u_i^2 and, if grad is
  /// given, its exact gradient with respect to the nodal values (the adjoint
  /// of the interpolation and the cumulative recurrences). The shortcut
  /// 4 w phi u is only correct up to the quadrature's lack of symmetry.
  double coupling(const RadialFunction& u, std::vector<double>* phi,
                  std::vector<double>* grad) const;

  const GridPtr& grid() const { return grid_; }
  double a() const { return a_; }

private:
  struct Point {
    std::array<std::uint32_t, 6> idx;
    std::array<double, 6> coef;
    double w1;
    double w2;
  };
  struct Cumulative {
    std::vector<double> mass;   // int_0^r f s^2 ds
    std::vector<double> outer;  // int_r^R f s ds
    std::vector<double> inner_y;  // e^{-mu r} int_0^r f s sinh(mu s) ds
    std::vector<double> outer_y;  // e^{mu r} int_r^R f s e^{-mu s} ds
  };

  Point make_point(std::size_t panel, double x) const;
  Cumulative accumulate(const RadialFunction& u) const;
  void phi_from(const Cumulative& c, std::vector<double>& phi,
                std::vector<double>* yukawa) const;

  GridPtr grid_;
  double a_;
  double mu_;
  double scale_;
  std::size_t gauss_;
  std::vector<Point> coulomb_;  // w1: s^2 weight, w2: s weight
  std::vector<Point> inner_;    // w1: fitted inner Yukawa weight
  std::vector<Point> outer_;    // w1: fitted outer Yukawa weight
  std::vector<double> decay_;   // e^{-mu (r_{i+1} - r_i)}
};

/// One-off solve; builds a PotentialOperator internally.
PotentialSolution solve_potential(const RadialFunction& u, const ProblemParams& params);

struct SubordinationReport {
  CheckStatus status = CheckStatus::not_applicable;
  /// max over nodes of a^2 Delta phi - phi.
  double max_excess = 0.0;
  double tolerance = 0.0;
};

/// Pointwise a^2 Delta phi_u <= phi_u; not applicable for a = 0.
SubordinationReport check_subordination(const PotentialSolution& sol,
                                        const ProblemParams& params,
                                        double tolerance = 1e-6);

struct CubeBoundReport {
  double lhs = 0.0;  // int |u|^3
  double rhs = 0.0;  // (1/pi) ||phi_u||_D ||grad u||_2
  double slack = 0.0;
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::pass;
};

/// int |u|^3 <= (1/pi) ||phi_u||_D ||grad u||_2.
CubeBoundReport cube_norm_bound(const RadialFunction& u, const PotentialSolution& sol,
                                double tolerance = 1e-6);

}  // namespace sbp
