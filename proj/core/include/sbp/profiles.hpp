#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sbp/radial.hpp"

namespace sbp {

/// amplitude * e^{-alpha r^2}
RadialFunction gaussian_profile(const GridPtr& grid, double alpha, double amplitude = 1.0);
/// amplitude * e^{-alpha r}
RadialFunction exponential_profile(const GridPtr& grid, double alpha, double amplitude = 1.0);

/// Seeded random radial profiles: sums of one to three Gaussian bumps
/// w_k (e^{-alpha_k (r - c_k)^2} + e^{-alpha_k (r + c_k)^2}) with log-uniform
/// alpha_k in [alpha_min, alpha_max], centers c_k in [0, max_center] and
/// weights w_k in [0.2, 1.5]. The mirrored term keeps u smooth and even at
/// the origin. Widths are clamped so every bump has decayed below e^{-40} at
/// r_max.
class ProfileSampler {
public:
  static constexpr double default_alpha_min = 0.05;
  static constexpr double default_alpha_max = 5.0;
  static constexpr double default_max_center = 3.0;

  explicit ProfileSampler(std::uint64_t seed, double alpha_min = default_alpha_min,
                          double alpha_max = default_alpha_max,
                          double max_center = default_max_center);

  RadialFunction next(const GridPtr& grid);

private:
  std::mt19937_64 rng_;
  double alpha_min_;
  double alpha_max_;
  double max_center_;
};

}  // namespace sbp
