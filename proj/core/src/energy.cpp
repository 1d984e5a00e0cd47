#include "sbp/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbp {

const char* to_string(NehariClass c) {
  switch (c) {
    case NehariClass::plus: return "plus";
    case NehariClass::zero: return "zero";
    case NehariClass::minus: return "minus";
    case NehariClass::off: return "off";
  }
  return "?";
}

EnergyModel::EnergyModel(GridPtr grid, ProblemParams params)
    : grid_(std::move(grid)), params_(params), potential_(grid_, params.a) {
  params_.validate();
}

FunctionalParts EnergyModel::parts(const RadialFunction& u, bool with_gradients) const {
  if (!u.grid() || !u.grid()->same_as(*grid_)) {
    throw std::invalid_argument("energy: function lives on a different grid");
  }
  const double p = params_.p;
  const auto w = grid_->weights();
  const std::size_t n = grid_->size();

  FunctionalParts out;
  const double b =
      potential_.coupling(u, &out.phi, with_gradients ? &out.grad_b : nullptr);
  const auto mu = apply_h1(*grid_, u.values(), params_.omega);

  double a = 0.0, pp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = u[i];
    a += ui * mu[i];
    pp += w[i] * std::pow(std::abs(ui), p);
  }
  out.coeffs = FiberCoeffs{a, b, pp, p};

  if (with_gradients) {
    out.grad_a.resize(n);
    out.grad_p.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double ui = u[i];
      out.grad_a[i] = 2.0 * mu[i];
      out.grad_p[i] = p * w[i] * std::pow(std::abs(ui), p - 2.0) * ui;
    }
  }
  return out;
}

EnergyBreakdown EnergyModel::energy_from(const FiberCoeffs& c, double q) {
  EnergyBreakdown e;
  e.q = q;
  e.quad = 0.5 * c.A;
  e.nonlocal = 0.25 * q * q * c.B;
  e.power = c.P / c.p;
  e.total = e.quad + e.nonlocal - e.power;
  return e;
}

EnergyBreakdown EnergyModel::energy(const RadialFunction& u, double q) const {
  return energy_from(parts(u, false).coeffs, q);
}

std::vector<double> EnergyModel::gradient_from(const FunctionalParts& parts, double q) {
  const std::size_t n = parts.grad_a.size();
  std::vector<double> g(n);
  const double c = 0.25 * q * q;
  const double inv_p = 1.0 / parts.coeffs.p;
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = 0.5 * parts.grad_a[i] + c * parts.grad_b[i] - inv_p * parts.grad_p[i];
  }
  return g;
}

std::vector<double> EnergyModel::gradient(const RadialFunction& u, double q) const {
  return gradient_from(parts(u, true), q);
}

RadialFunction EnergyModel::euler_residual(const RadialFunction& u, double q) const {
  const auto fp = parts(u, true);
  const auto g = gradient_from(fp, q);
  const auto w = grid_->weights();
  const auto r = grid_->r();
  RadialFunction res(grid_);
  for (std::size_t i = 1; i < g.size(); ++i) res[i] = g[i] / w[i];
  // The origin carries no weight; use -Delta u(0) = -3 u''(0).
  const double lap0 = -6.0 * (u[1] - u[0]) / (r[1] * r[1]);
  const double u0 = u[0];
  res[0] = lap0 + params_.omega * u0 + q * q * fp.phi[0] * u0 -
           std::pow(std::abs(u0), params_.p - 2.0) * u0;
  return res;
}

double EnergyModel::residual_l2(const RadialFunction& u, double q) const {
  const auto res = euler_residual(u, q);
  return std::sqrt(l2_inner(res, res));
}

RadialFunction EnergyModel::sobolev_gradient(const RadialFunction& u, double q) const {
  return RadialFunction(grid_, solve_h1(*grid_, gradient(u, q), params_.omega));
}

double EnergyModel::stationarity(const std::vector<double>& dj) const {
  const auto g = solve_h1(*grid_, dj, params_.omega);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * dj[i];
  return std::sqrt(std::max(s, 0.0));
}

NehariReport EnergyModel::nehari_classify(const FiberCoeffs& c, double q, double tol) {
  NehariReport rep;
  rep.dpsi1 = dpsi(c, q, 1.0);
  rep.d2psi1 = d2psi(c, q, 1.0);
  if (std::abs(rep.dpsi1) > tol * c.A) {
    rep.cls = NehariClass::off;
  } else if (std::abs(rep.d2psi1) <= tol * std::max(1.0, std::abs(c.A))) {
    rep.cls = NehariClass::zero;
  } else {
    rep.cls = rep.d2psi1 > 0.0 ? NehariClass::plus : NehariClass::minus;
  }
  return rep;
}

NehariReport EnergyModel::nehari_classify(const RadialFunction& u, double q,
                                          double tol) const {
  if (u.is_zero()) throw std::invalid_argument("Nehari classification of u = 0");
  return nehari_classify(parts(u, false).coeffs, q, tol);
}

EnergyBreakdown energy(const RadialFunction& u, double q, const ProblemParams& params) {
  return EnergyModel(u.grid(), params).energy(u, q);
}

RadialFunction euler_residual(const RadialFunction& u, double q, const ProblemParams& params) {
  return EnergyModel(u.grid(), params).euler_residual(u, q);
}

RadialFunction sobolev_gradient(const RadialFunction& u, double q,
                                const ProblemParams& params) {
  return EnergyModel(u.grid(), params).sobolev_gradient(u, q);
}

NehariReport nehari_classify(const RadialFunction& u, double q, const ProblemParams& params,
                             double tol) {
  return EnergyModel(u.grid(), params).nehari_classify(u, q, tol);
}

NehariGeometry nehari_geometry(double c_emb, double p, double rho_fraction) {
  if (!(c_emb > 0.0) || !std::isfinite(c_emb)) {
    throw std::invalid_argument("embedding constant must be positive");
  }
  if (!(rho_fraction > 0.0 && rho_fraction < 1.0)) {
    throw std::invalid_argument("rho fraction must lie in (0, 1)");
  }
  NehariGeometry g;
  g.c_emb = c_emb;
  g.c_tilde = std::pow(c_emb, -1.0 / (p - 2.0));
  g.rho = rho_fraction * g.c_tilde;
  g.barrier = 0.5 * g.rho * g.rho - c_emb / p * std::pow(g.rho, p);
  return g;
}

}  // namespace sbp
