#pragma once

// Reference values computed independently of the library code paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

/// Composite Simpson rule on [lo, hi] with 2 * half_panels intervals.
inline double simpson(const std::function<double(double)>& f, double lo, double hi,
                      int half_panels = 20000) {
  const int n = 2 * half_panels;
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Shell-theorem radial potential of the kernel (1 - e^{-t/a}) / t (or 1/t for
/// a = 0) against the density f(s) = u(s)^2, evaluated at r > 0 by a direct
/// double integral over shells.
inline double shell_potential(const std::function<double(double)>& u, double a, double r,
                              double s_max = 12.0) {
  auto g = [&](double s) {
    const double d = std::abs(r - s);
    const double sum = r + s;
    double inner = sum - d;
    if (a > 0.0) inner += a * (std::exp(-sum / a) - std::exp(-d / a));
    const double us = u(s);
    return s * us * us * inner;
  };
  // Split at s = r where the integrand has a kink.
  const double lo = std::min(r, s_max);
  return 2.0 * pi / r * (simpson(g, 0.0, lo, 4000) + simpson(g, lo, s_max, 20000));
}

/// Newton potential of e^{-2 r^2} (density of u = e^{-r^2}).
inline double gaussian_newton(double r) {
  if (r == 0.0) return pi;
  return std::pow(pi, 1.5) * std::erf(std::sqrt(2.0) * r) / (2.0 * std::sqrt(2.0) * r);
}

}  // namespace oracle
