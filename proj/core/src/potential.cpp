#include "sbp/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "gauss.hpp"

namespace sbp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr int kGaussOrder = 6;
// Exterior Yukawa tail is integrated out to r_max + kTailLengths / mu.
constexpr double kTailLengths = 40.0;
constexpr int kTailPanels = 40;

inline double eval(const std::array<std::uint32_t, 6>& idx,
                   const std::array<double, 6>& coef, std::span<const double> u) {
  double v = 0.0;
  for (int k = 0; k < 6; ++k) v += coef[k] * u[idx[k]];
  return v;
}

}  // namespace

PotentialOperator::PotentialOperator(GridPtr grid, double a, double kernel_scale)
    : grid_(std::move(grid)), a_(a), mu_(a > 0.0 ? 1.0 / a : 0.0),
      scale_(kernel_scale), gauss_(kGaussOrder) {
  if (!grid_) throw std::invalid_argument("null grid");
  if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("a must be >= 0");

  const auto [gx, gw] = detail::gauss_legendre01(kGaussOrder);
  const auto r = grid_->r();
  const double h = grid_->dx();
  const std::size_t panels = grid_->size() - 1;

  coulomb_.reserve(panels * gauss_);
  for (std::size_t i = 0; i < panels; ++i) {
    const double x0 = static_cast<double>(i) * h;
    for (std::size_t g = 0; g < gauss_; ++g) {
      const double x = x0 + gx[g] * h;
      const double s = grid_->r_of_x(x);
      const double jac = gw[g] * h * grid_->dr_dx(x);
      Point pt = make_point(i, x);
      pt.w1 = jac * s * s;
      pt.w2 = jac * s;
      coulomb_.push_back(pt);
    }
  }

  if (mu_ == 0.0) return;

  inner_.reserve(panels * gauss_);
  outer_.reserve(panels * gauss_);
  decay_.resize(panels);
  for (std::size_t i = 0; i < panels; ++i) {
    const double sa = r[i];
    const double sb = r[i + 1];
    const double len = sb - sa;
    // int_0^len G(t) e^{-mu t} dt = (E/mu) int_0^1 G(t(y)) dy with
    // t(y) = -log(1 - y E) / mu and E = 1 - e^{-mu len}.
    const double e = -std::expm1(-mu_ * len);
    const double jac = e / mu_;
    decay_[i] = std::exp(-mu_ * len);
    for (std::size_t g = 0; g < gauss_; ++g) {
      const double t = std::min(len, -std::log1p(-gx[g] * e) / mu_);

      const double s_in = sb - t;
      Point pin = make_point(i, grid_->x_of_r(s_in));
      pin.w1 = jac * gw[g] * 0.5 * (-std::expm1(-2.0 * mu_ * s_in)) * s_in;
      pin.w2 = 0.0;
      inner_.push_back(pin);

      const double s_out = sa + t;
      Point pout = make_point(i, grid_->x_of_r(s_out));
      pout.w1 = jac * gw[g] * s_out;
      pout.w2 = 0.0;
      outer_.push_back(pout);
    }
  }
}

PotentialOperator::Point PotentialOperator::make_point(std::size_t panel, double x) const {
  const auto n = static_cast<long>(grid_->size());
  long j0 = static_cast<long>(panel) - 2;
  if (j0 + 5 > n - 1) j0 = n - 6;
  const double t = x / grid_->dx() - static_cast<double>(j0);
  Point pt{};
  for (int k = 0; k < 6; ++k) {
    double c = 1.0;
    for (int m = 0; m < 6; ++m) {
      if (m != k) c *= (t - m) / static_cast<double>(k - m);
    }
    pt.coef[k] = c;
    // u(R(x)) is even in x, so nodes left of the origin mirror to the right.
    pt.idx[k] = static_cast<std::uint32_t>(std::labs(j0 + k));
  }
  return pt;
}

PotentialOperator::Cumulative PotentialOperator::accumulate(const RadialFunction& u) const {
  if (!u.grid() || !u.grid()->same_as(*grid_)) {
    throw std::invalid_argument("potential: function and operator grids differ");
  }
  const std::size_t n = grid_->size();
  const auto vals = u.values();
  Cumulative c;
  c.mass.assign(n, 0.0);
  c.outer.assign(n, 0.0);

  std::vector<double> panel_s2(n - 1), panel_s(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double a2 = 0.0, a1 = 0.0;
    for (std::size_t g = 0; g < gauss_; ++g) {
      const Point& pt = coulomb_[i * gauss_ + g];
      const double v = eval(pt.idx, pt.coef, vals);
      a2 += pt.w1 * v * v;
      a1 += pt.w2 * v * v;
    }
    panel_s2[i] = a2;
    panel_s[i] = a1;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) c.mass[i + 1] = c.mass[i] + panel_s2[i];
  for (std::size_t i = n - 1; i-- > 0;) c.outer[i] = c.outer[i + 1] + panel_s[i];

  if (mu_ == 0.0) return c;

  c.inner_y.assign(n, 0.0);
  c.outer_y.assign(n, 0.0);
  std::vector<double> panel_in(n - 1), panel_out(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double yi = 0.0, yo = 0.0;
    for (std::size_t g = 0; g < gauss_; ++g) {
      const Point& pi = inner_[i * gauss_ + g];
      const double vi = eval(pi.idx, pi.coef, vals);
      yi += pi.w1 * vi * vi;
      const Point& po = outer_[i * gauss_ + g];
      const double vo = eval(po.idx, po.coef, vals);
      yo += po.w1 * vo * vo;
    }
    panel_in[i] = yi;
    panel_out[i] = yo;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    c.inner_y[i + 1] = decay_[i] * c.inner_y[i] + panel_in[i];
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    c.outer_y[i] = decay_[i] * c.outer_y[i + 1] + panel_out[i];
  }
  return c;
}

void PotentialOperator::phi_from(const Cumulative& c, std::vector<double>& phi,
                                 std::vector<double>* yukawa) const {
  const auto r = grid_->r();
  const std::size_t n = r.size();
  phi.resize(n);
  if (yukawa) yukawa->assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double coulomb =
        i == 0 ? kFourPi * c.outer[0] : kFourPi * (c.mass[i] / r[i] + c.outer[i]);
    double screened = 0.0;
    if (mu_ > 0.0) {
      if (i == 0) {
        screened = kFourPi * c.outer_y[0];
      } else {
        const double mr = mu_ * r[i];
        screened = kFourPi / mr *
                   (c.inner_y[i] + c.outer_y[i] * 0.5 * (-std::expm1(-2.0 * mr)));
      }
    }
    phi[i] = scale_ * (coulomb - screened);
    if (yukawa) (*yukawa)[i] = screened;
  }
}

std::vector<double> PotentialOperator::phi_values(const RadialFunction& u) const {
  std::vector<double> phi;
  phi_from(accumulate(u), phi, nullptr);
  return phi;
}

double PotentialOperator::coupling(const RadialFunction& u, std::vector<double>* phi_out,
                                   std::vector<double>* grad) const {
  const Cumulative c = accumulate(u);
  std::vector<double> phi;
  phi_from(c, phi, nullptr);
  const auto w = grid_->weights();
  const auto r = grid_->r();
  const auto vals = u.values();
  const std::size_t n = r.size();

  double b = 0.0;
  for (std::size_t i = 0; i < n; ++i) b += w[i] * phi[i] * u[i] * u[i];

  if (grad) {
    grad->assign(n, 0.0);
    auto& g = *grad;
    for (std::size_t i = 0; i < n; ++i) g[i] = 2.0 * w[i] * phi[i] * u[i];

    // beta_i = dB / dphi_i; propagate it back to the panel sums.
    std::vector<double> beta(n);
    for (std::size_t i = 0; i < n; ++i) beta[i] = scale_ * w[i] * u[i] * u[i];

    std::vector<double> c_mass(n - 1), c_outer(n - 1);
    double acc = 0.0;
    for (std::size_t j = n - 1; j-- > 0;) {
      acc += beta[j + 1] / r[j + 1];
      c_mass[j] = kFourPi * acc;
    }
    acc = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      acc += beta[j];
      c_outer[j] = kFourPi * acc;
    }

    // v_g = interpolated u at the point; d(v^2)/du_k = 2 v coef_k.
    auto scatter = [&](const Point& pt, double weight) {
      const double v = eval(pt.idx, pt.coef, vals);
      const double s = 2.0 * weight * v;
      for (int k = 0; k < 6; ++k) g[pt.idx[k]] += s * pt.coef[k];
    };
    for (std::size_t j = 0; j + 1 < n; ++j) {
      for (std::size_t q = 0; q < gauss_; ++q) {
        const Point& pt = coulomb_[j * gauss_ + q];
        scatter(pt, c_mass[j] * pt.w1 + c_outer[j] * pt.w2);
      }
    }

    if (mu_ > 0.0) {
      std::vector<double> gam(n, 0.0), del(n, 0.0);
      for (std::size_t i = 1; i < n; ++i) {
        const double mr = mu_ * r[i];
        gam[i] = beta[i] * kFourPi / mr;
        del[i] = beta[i] * kFourPi / mr * 0.5 * (-std::expm1(-2.0 * mr));
      }
      del[0] = beta[0] * kFourPi;
      std::vector<double> c_in(n - 1), c_out(n - 1);
      c_in[n - 2] = gam[n - 1];
      for (std::size_t j = n - 2; j-- > 0;) c_in[j] = gam[j + 1] + decay_[j + 1] * c_in[j + 1];
      c_out[0] = del[0];
      for (std::size_t j = 1; j + 1 < n; ++j) c_out[j] = del[j] + decay_[j - 1] * c_out[j - 1];
      for (std::size_t j = 0; j + 1 < n; ++j) {
        for (std::size_t q = 0; q < gauss_; ++q) {
          scatter(inner_[j * gauss_ + q], -c_in[j] * inner_[j * gauss_ + q].w1);
          scatter(outer_[j * gauss_ + q], -c_out[j] * outer_[j * gauss_ + q].w1);
        }
      }
    }
  }
  if (phi_out) *phi_out = std::move(phi);
  return b;
}

PotentialSolution PotentialOperator::solve(const RadialFunction& u) const {
  const Cumulative c = accumulate(u);
  const auto r = grid_->r();
  const std::size_t n = r.size();

  std::vector<double> phi, yuk;
  phi_from(c, phi, &yuk);

  std::vector<double> dphi(n, 0.0), lap(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    double d = -kFourPi * c.mass[i] / (r[i] * r[i]);
    if (mu_ > 0.0) {
      const double e2 = std::exp(-2.0 * mu_ * r[i]);
      const double dy = -yuk[i] / r[i] +
                        kFourPi / r[i] * (-c.inner_y[i] + c.outer_y[i] * 0.5 * (1.0 + e2));
      d -= dy;
    }
    dphi[i] = scale_ * d;
  }
  for (std::size_t i = 0; i < n; ++i) {
    lap[i] = scale_ * (mu_ > 0.0 ? -mu_ * mu_ * yuk[i] : -kFourPi * u[i] * u[i]);
  }

  const auto w = grid_->weights();
  double b = 0.0, dn = 0.0;
  const double a2 = a_ * a_;
  for (std::size_t i = 0; i < n; ++i) {
    b += w[i] * phi[i] * u[i] * u[i];
    dn += w[i] * (dphi[i] * dphi[i] + a2 * lap[i] * lap[i]);
  }

  // Exterior r > R: phi_C = A0 / r and phi_Y = Y0 e^{-mu (r - R)} / r.
  const double big_r = r[n - 1];
  const double a0 = scale_ * kFourPi * c.mass[n - 1];
  dn += kFourPi * a0 * a0 / big_r;
  if (mu_ > 0.0) {
    const double y0 = scale_ * kFourPi * c.inner_y[n - 1] / mu_;
    if (y0 != 0.0) {
      const auto [gx, gw] = detail::gauss_legendre01(kGaussOrder);
      const double len = kTailLengths / mu_ / kTailPanels;
      double tail = 0.0;
      for (int p = 0; p < kTailPanels; ++p) {
        for (int g = 0; g < kGaussOrder; ++g) {
          const double s = big_r + (p + gx[g]) * len;
          const double e = std::exp(-mu_ * (s - big_r));
          const double cross = -2.0 * a0 * y0 * e * (1.0 / (s * s) + mu_ / s);
          const double sq = y0 * y0 * e * e * (1.0 / s + mu_) * (1.0 / s + mu_);
          tail += gw[g] * len * kFourPi * (cross + sq);
        }
      }
      dn += tail + 2.0 * kPi * mu_ * y0 * y0;
    }
  }

  PotentialSolution sol;
  sol.phi = RadialFunction(grid_, std::move(phi));
  sol.lap_phi = RadialFunction(grid_, std::move(lap));
  sol.dphi = RadialFunction(grid_, std::move(dphi));
  sol.b_coupling = b;
  sol.d_norm_sq = dn;
  return sol;
}

PotentialSolution solve_potential(const RadialFunction& u, const ProblemParams& params) {
  return PotentialOperator(u.grid(), params.a).solve(u);
}

SubordinationReport check_subordination(const PotentialSolution& sol,
                                        const ProblemParams& params, double tolerance) {
  SubordinationReport rep;
  rep.tolerance = tolerance;
  if (params.a == 0.0) {
    rep.status = CheckStatus::not_applicable;
    return rep;
  }
  const double a2 = params.a * params.a;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sol.phi.size(); ++i) {
    worst = std::max(worst, a2 * sol.lap_phi[i] - sol.phi[i]);
  }
  rep.max_excess = worst;
  rep.status = worst <= tolerance ? CheckStatus::pass : CheckStatus::fail;
  return rep;
}

CubeBoundReport cube_norm_bound(const RadialFunction& u, const PotentialSolution& sol,
                                double tolerance) {
  require_same_grid(u, sol.phi);
  CubeBoundReport rep;
  rep.tolerance = tolerance;
  rep.lhs = lp_norm_p(u, 3.0);
  rep.rhs = std::sqrt(std::max(sol.d_norm_sq, 0.0)) *
            std::sqrt(gradient_norm_sq(u)) / kPi;
  rep.slack = rep.rhs - rep.lhs;
  rep.status = rep.slack >= -tolerance ? CheckStatus::pass : CheckStatus::fail;
  return rep;
}

}  // namespace sbp
