#include "sbp/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sbp {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

// Composite trapezoid weights with sixth-order Gregory corrections at the
// right end, listed from the last node inwards.
constexpr std::array<double, 6> kGregoryEnd = {
    19087.0 / 60480.0, 84199.0 / 60480.0, 18869.0 / 30240.0,
    37621.0 / 30240.0, 55031.0 / 60480.0, 61343.0 / 60480.0};

}  // namespace

void ProblemParams::validate() const {
  if (!(p > 2.0 && p <= 3.0)) {
    throw std::invalid_argument("p must lie in (2, 3], got " + std::to_string(p));
  }
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("a must be a finite value >= 0");
  }
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw std::invalid_argument("omega must be a finite value > 0");
  }
}

const char* to_string(GridScheme scheme) {
  return scheme == GridScheme::uniform ? "uniform" : "graded";
}

GridScheme grid_scheme_from_string(const std::string& name) {
  if (name == "uniform") return GridScheme::uniform;
  if (name == "graded") return GridScheme::graded;
  throw std::invalid_argument("unknown grid scheme '" + name + "'");
}

RadialGrid::RadialGrid(double r_max, std::size_t n, GridScheme scheme, double grading)
    : r_max_(r_max), scheme_(scheme), grading_(grading) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw std::invalid_argument("r_max must be positive");
  }
  if (n < 16) {
    throw std::invalid_argument("grid needs at least 16 nodes");
  }
  if (scheme == GridScheme::graded && !(grading > 0.0)) {
    throw std::invalid_argument("grading must be positive");
  }
  dx_ = 1.0 / static_cast<double>(n - 1);

  r_.resize(n);
  w_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) * dx_;
    r_[i] = r_of_x(x);
    w_[i] = dx_ * kFourPi * r_[i] * r_[i] * dr_dx(x);
  }
  r_.front() = 0.0;
  r_.back() = r_max_;
  for (std::size_t j = 0; j < kGregoryEnd.size(); ++j) {
    w_[n - 1 - j] *= kGregoryEnd[j];
  }
  // Rescale so the rule is exact on constants; the factor is 1 + O(h^7).
  double vol = 0.0;
  for (double w : w_) vol += w;
  const double scale = kFourPi * r_max_ * r_max_ * r_max_ / 3.0 / vol;
  for (double& w : w_) w *= scale;

  k_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double xm = (static_cast<double>(i) + 0.5) * dx_;
    const double rm = r_of_x(xm);
    k_[i] = kFourPi * rm * rm / (dr_dx(xm) * dx_);
  }
}

double RadialGrid::r_of_x(double x) const {
  if (scheme_ == GridScheme::uniform) return r_max_ * x;
  return r_max_ * std::sinh(grading_ * x) / std::sinh(grading_);
}

double RadialGrid::dr_dx(double x) const {
  if (scheme_ == GridScheme::uniform) return r_max_;
  return r_max_ * grading_ * std::cosh(grading_ * x) / std::sinh(grading_);
}

double RadialGrid::x_of_r(double r) const {
  if (scheme_ == GridScheme::uniform) return r / r_max_;
  return std::asinh(r * std::sinh(grading_) / r_max_) / grading_;
}

bool RadialGrid::same_as(const RadialGrid& other) const {
  return this == &other ||
         (r_max_ == other.r_max_ && scheme_ == other.scheme_ &&
          size() == other.size() &&
          (scheme_ == GridScheme::uniform || grading_ == other.grading_));
}

GridPtr make_grid(double r_max, std::size_t n, GridScheme scheme, double grading) {
  return std::make_shared<const RadialGrid>(r_max, n, scheme, grading);
}

RadialFunction::RadialFunction(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("null grid");
  vals_.assign(grid_->size(), 0.0);
}

RadialFunction::RadialFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), vals_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("null grid");
  if (vals_.size() != grid_->size()) {
    throw std::invalid_argument("value count does not match grid size");
  }
}

RadialFunction RadialFunction::sample(GridPtr grid,
                                      const std::function<double(double)>& f) {
  RadialFunction u(std::move(grid));
  const auto r = u.grid()->r();
  for (std::size_t i = 0; i < r.size(); ++i) u.vals_[i] = f(r[i]);
  return u;
}

bool RadialFunction::is_finite() const {
  return std::all_of(vals_.begin(), vals_.end(),
                     [](double v) { return std::isfinite(v); });
}

bool RadialFunction::is_zero() const {
  return std::all_of(vals_.begin(), vals_.end(), [](double v) { return v == 0.0; });
}

RadialFunction& RadialFunction::operator+=(const RadialFunction& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < vals_.size(); ++i) vals_[i] += other.vals_[i];
  return *this;
}

RadialFunction& RadialFunction::operator-=(const RadialFunction& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < vals_.size(); ++i) vals_[i] -= other.vals_[i];
  return *this;
}

RadialFunction& RadialFunction::operator*=(double c) {
  for (double& v : vals_) v *= c;
  return *this;
}

void require_same_grid(const RadialFunction& u, const RadialFunction& v) {
  if (!u.grid() || !v.grid() || !u.grid()->same_as(*v.grid())) {
    throw std::invalid_argument("radial functions live on different grids");
  }
}

double integrate(const RadialGrid& grid, std::span<const double> g) {
  const auto w = grid.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * g[i];
  return s;
}

double integrate(const RadialFunction& g) { return integrate(*g.grid(), g.values()); }

double l2_inner(const RadialFunction& u, const RadialFunction& v) {
  require_same_grid(u, v);
  const auto w = u.grid()->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * u[i] * v[i];
  return s;
}

double gradient_norm_sq(const RadialFunction& u) {
  const auto k = u.grid()->stiffness();
  double s = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double d = u[i + 1] - u[i];
    s += k[i] * d * d;
  }
  return s;
}

double h1_inner(const RadialFunction& u, const RadialFunction& v, double omega) {
  require_same_grid(u, v);
  const auto k = u.grid()->stiffness();
  double s = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    s += k[i] * (u[i + 1] - u[i]) * (v[i + 1] - v[i]);
  }
  return s + omega * l2_inner(u, v);
}

double h1_norm_sq(const RadialFunction& u, const ProblemParams& params) {
  return gradient_norm_sq(u) + params.omega * l2_inner(u, u);
}

double lp_norm_p(const RadialFunction& u, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("lp_norm_p needs p > 1");
  const auto w = u.grid()->weights();
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::pow(std::abs(u[i]), p);
  return s;
}

std::vector<double> apply_h1(const RadialGrid& grid, std::span<const double> u,
                             double omega) {
  const auto k = grid.stiffness();
  const auto w = grid.weights();
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = omega * w[i] * u[i];
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double flux = k[i] * (u[i + 1] - u[i]);
    out[i] -= flux;
    out[i + 1] += flux;
  }
  return out;
}

std::vector<double> solve_h1(const RadialGrid& grid, std::span<const double> rhs,
                             double omega) {
  if (!(omega > 0.0)) throw std::logic_error("H1 operator is singular for omega <= 0");
  const auto k = grid.stiffness();
  const auto w = grid.weights();
  const std::size_t n = rhs.size();
  // Thomas algorithm; M is an M-matrix so no pivoting is needed.
  std::vector<double> c(n, 0.0);
  std::vector<double> x(rhs.begin(), rhs.end());
  double prev_c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? k[i - 1] : 0.0;
    const double right = i + 1 < n ? k[i] : 0.0;
    const double diag = omega * w[i] + left + right + left * prev_c;
    if (!(diag > 0.0)) throw std::logic_error("H1 operator lost positivity");
    c[i] = -right / diag;
    x[i] = (x[i] + (i > 0 ? left * x[i - 1] : 0.0)) / diag;
    prev_c = c[i];
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
  return x;
}

}  // namespace sbp
