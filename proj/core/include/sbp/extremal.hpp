#pragma once

#include <cstdint>
#include <string>

#include "sbp/energy.hpp"
#include "sbp/radial.hpp"

namespace sbp {

struct SearchConfig {
  /// Log-spaced widths per trial family.
  std::size_t family_points = 41;
  double gauss_alpha_min = 0.01;
  double gauss_alpha_max = 10.0;
  double exp_alpha_min = 0.05;
  double exp_alpha_max = 20.0;
  bool exponential_family = true;
  /// L-BFGS budget for the free ascent on nodal values; 0 skips it.
  int ascent_iterations = 200;
  /// Stop when the H^1-dual norm of the gradient of log q drops below this.
  double ascent_tol = 1e-10;
  unsigned jobs = 1;

  /// Throws std::invalid_argument on an empty or inconsistent budget.
  void validate() const;
};

/// Lower bounds for q* = sup q(u) and q0* = sup q0(u). Both come from the
/// same maximizer since q0(u) / q(u) is a constant.
struct ExtremalEstimate {
  double q_star_lb = 0.0;
  double q0_star_lb = 0.0;
  /// Maximizing profile, normalized to ||u|| = 1.
  RadialFunction maximizer;
  /// "gaussian" or "exponential" when the family scan won, otherwise
  /// "free-ascent".
  std::string family_tag;
  std::string seed_family;
  double seed_alpha = 0.0;
  double family_best = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Family scan over Gaussians and exponentials followed by L-BFGS ascent of
/// log q(u) on the nodal values, renormalized to unit H^1 norm after every
/// step. Throws std::runtime_error if no trial function gives a finite q(u).
ExtremalEstimate estimate_extremals(const GridPtr& grid, const ProblemParams& params,
                                    const SearchConfig& search = {});

/// Empirical embedding constant sup ||u||_p^p / ||u||^p by the same two-phase
/// search. A lower bound for the true constant on this grid.
double estimate_embedding_constant(const GridPtr& grid, const ProblemParams& params,
                                   const SearchConfig& search = {});

struct CertificateReport {
  double q = 0.0;
  std::size_t samples = 0;
  std::size_t above = 0;  // q > q(u): case three expected
  std::size_t below = 0;  // q < q(u): case one expected
  std::size_t at = 0;     // q within the band of q(u): case two expected
  std::size_t violations = 0;
  /// Largest relative q(u) seen among the samples, max q(u) / q.
  double max_ratio = 0.0;
};

/// Per-profile fiber certificates on seeded random profiles: for each u the
/// classification at q must be case three above q(u), case one below and
/// case two within the band.
CertificateReport per_u_certificates(const GridPtr& grid, const ProblemParams& params,
                                     double q, std::size_t samples, std::uint64_t seed,
                                     unsigned jobs = 1);

}  // namespace sbp
