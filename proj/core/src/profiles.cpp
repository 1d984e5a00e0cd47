#include "sbp/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbp {

RadialFunction gaussian_profile(const GridPtr& grid, double alpha, double amplitude) {
  if (!(alpha > 0.0)) throw std::invalid_argument("gaussian width must be positive");
  return RadialFunction::sample(
      grid, [=](double r) { return amplitude * std::exp(-alpha * r * r); });
}

RadialFunction exponential_profile(const GridPtr& grid, double alpha, double amplitude) {
  if (!(alpha > 0.0)) throw std::invalid_argument("exponential rate must be positive");
  return RadialFunction::sample(grid,
                                [=](double r) { return amplitude * std::exp(-alpha * r); });
}

ProfileSampler::ProfileSampler(std::uint64_t seed, double alpha_min, double alpha_max,
                               double max_center)
    : rng_(seed), alpha_min_(alpha_min), alpha_max_(alpha_max), max_center_(max_center) {
  if (!(alpha_min > 0.0 && alpha_max >= alpha_min) || !(max_center >= 0.0)) {
    throw std::invalid_argument("invalid profile sampler ranges");
  }
}

RadialFunction ProfileSampler::next(const GridPtr& grid) {
  // Draws go through a fixed sequence of uniform variates so results do not
  // depend on the standard library's distribution implementations.
  auto uniform = [this] { return std::generate_canonical<double, 53>(rng_); };
  const int bumps = 1 + static_cast<int>(uniform() * 3.0) % 3;
  struct Bump {
    double alpha, center, weight;
  };
  std::vector<Bump> list;
  const double la = std::log(alpha_min_), lb = std::log(alpha_max_);
  for (int k = 0; k < bumps; ++k) {
    Bump b;
    b.alpha = std::exp(la + (lb - la) * uniform());
    b.center = max_center_ * uniform();
    b.weight = 0.2 + 1.3 * uniform();
    const double gap = std::max(grid->r_max() - b.center, 1e-3);
    b.alpha = std::max(b.alpha, 40.0 / (gap * gap));
    list.push_back(b);
  }
  return RadialFunction::sample(grid, [&list](double r) {
    double v = 0.0;
    for (const auto& b : list) {
      v += b.weight * (std::exp(-b.alpha * (r - b.center) * (r - b.center)) +
                       std::exp(-b.alpha * (r + b.center) * (r + b.center)));
    }
    return v;
  });
}

}  // namespace sbp
