#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sbp {

/// Fixed model constants: nonlinearity exponent p, Bopp-Podolsky length a and
/// frequency omega.
struct ProblemParams {
  double p = 2.5;
  double a = 1.0;
  double omega = 1.0;

  /// Throws std::invalid_argument unless 2 < p <= 3, a >= 0, omega > 0.
  void validate() const;
};

enum class GridScheme { uniform, graded };

const char* to_string(GridScheme scheme);
GridScheme grid_scheme_from_string(const std::string& name);

/// Radial nodes r_0 = 0 < r_1 < ... < r_{n-1} = r_max together with weights for
/// the measure 4 pi r^2 dr.
///
/// Nodes are the image of a uniform parameter x_i = i / (n - 1) under an odd
/// map r = R(x): R(x) = r_max x (uniform) or R(x) = r_max sinh(b x) / sinh(b)
/// (graded, b = grading). Integrals are trapezoidal in x with sixth-order
/// Gregory end corrections at r_max. Because R is odd, a smooth radial
/// integrand is an even function of x and the rule is spectrally accurate at
/// the origin; at r_max the error is O(h^7). The weights are normalized so
/// that constants integrate to the ball volume exactly. On the uniform scheme
/// polynomials in r^2 up to degree four are integrated to round-off.
///
/// The gradient energy uses staggered differences (u_{i+1} - u_i) / h weighted
/// by 4 pi R^2 / R' at x_{i+1/2}; this is second order and its first variation
/// is the conservative three-point radial Laplacian with u'(0) = 0 built in.
class RadialGrid {
public:
  static constexpr double default_r_max = 40.0;
  static constexpr std::size_t default_n = 2048;
  static constexpr double default_grading = 3.0;

  RadialGrid(double r_max, std::size_t n, GridScheme scheme,
             double grading = default_grading);

  std::size_t size() const { return r_.size(); }
  double r_max() const { return r_max_; }
  GridScheme scheme() const { return scheme_; }
  double grading() const { return grading_; }
  /// Uniform spacing of the parameter x.
  double dx() const { return dx_; }

  std::span<const double> r() const { return r_; }
  std::span<const double> weights() const { return w_; }
  /// Coefficients k_{i+1/2} of the staggered gradient form, length n - 1.
  std::span<const double> stiffness() const { return k_; }

  double r_of_x(double x) const;
  double dr_dx(double x) const;
  double x_of_r(double r) const;

  bool same_as(const RadialGrid& other) const;

private:
  double r_max_;
  GridScheme scheme_;
  double grading_;
  double dx_;
  std::vector<double> r_;
  std::vector<double> w_;
  std::vector<double> k_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Builds a grid; r_max > 0 and n >= 16 or std::invalid_argument.
GridPtr make_grid(double r_max = RadialGrid::default_r_max,
                  std::size_t n = RadialGrid::default_n,
                  GridScheme scheme = GridScheme::graded,
                  double grading = RadialGrid::default_grading);

/// A radial profile u(r) sampled at the nodes of a shared grid.
class RadialFunction {
public:
  RadialFunction() = default;
  explicit RadialFunction(GridPtr grid);
  RadialFunction(GridPtr grid, std::vector<double> values);

  static RadialFunction sample(GridPtr grid,
                               const std::function<double(double)>& f);

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return vals_.size(); }
  std::span<const double> values() const { return vals_; }
  std::span<double> values() { return vals_; }
  double operator[](std::size_t i) const { return vals_[i]; }
  double& operator[](std::size_t i) { return vals_[i]; }

  bool is_finite() const;
  bool is_zero() const;

  RadialFunction& operator+=(const RadialFunction& other);
  RadialFunction& operator-=(const RadialFunction& other);
  RadialFunction& operator*=(double c);

  friend RadialFunction operator+(RadialFunction lhs, const RadialFunction& rhs) {
    return lhs += rhs;
  }
  friend RadialFunction operator-(RadialFunction lhs, const RadialFunction& rhs) {
    return lhs -= rhs;
  }
  friend RadialFunction operator*(double c, RadialFunction u) { return u *= c; }
  friend RadialFunction operator*(RadialFunction u, double c) { return u *= c; }

private:
  GridPtr grid_;
  std::vector<double> vals_;
};

/// Throws std::invalid_argument unless both functions live on the same grid.
void require_same_grid(const RadialFunction& u, const RadialFunction& v);

/// Quadrature of g(r) 4 pi r^2 over [0, r_max] for nodal values g.
double integrate(const RadialGrid& grid, std::span<const double> g);
double integrate(const RadialFunction& g);

/// Weighted L2 inner product.
double l2_inner(const RadialFunction& u, const RadialFunction& v);
/// ||grad u||_2^2 from the staggered form.
double gradient_norm_sq(const RadialFunction& u);
/// ||grad u||_2^2 + omega ||u||_2^2.
double h1_norm_sq(const RadialFunction& u, const ProblemParams& params);
double h1_inner(const RadialFunction& u, const RadialFunction& v, double omega);
/// ||u||_p^p; p > 1 or std::invalid_argument.
double lp_norm_p(const RadialFunction& u, double p);

/// The discrete operator (-Delta + omega) in weak form: returns the vector
/// M u with u^T M u = h1_norm_sq(u). M is symmetric positive definite for
/// omega > 0.
std::vector<double> apply_h1(const RadialGrid& grid, std::span<const double> u,
                             double omega);
/// Solves M g = rhs for the tridiagonal M above.
std::vector<double> solve_h1(const RadialGrid& grid, std::span<const double> rhs,
                             double omega);

}  // namespace sbp
