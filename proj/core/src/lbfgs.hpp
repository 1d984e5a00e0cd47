#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <vector>

namespace sbp::detail {

// Limited-memory BFGS in a metric M: H0 = gamma M^{-1} in the two-loop
// recursion, so the first step is a Sobolev-gradient step. Gradients are dual
// vectors (dot with a displacement gives the directional derivative).

struct LbfgsOptions {
  int max_iter = 500;
  int memory = 8;
  double gtol = 1e-8;
  double armijo = 1e-4;
  // Relative error of f below which decreases are taken on trust.
  double f_noise = 1e-6;
  int max_backtrack = 60;
  // Length in the metric of the very first step.
  double first_step = 0.1;
  // Objective is invariant under x -> c x: the normalizer may rescale x after
  // each step and the history is rescaled to match.
  bool zero_homogeneous = false;
};

enum class LbfgsStop { converged, max_iter, line_search, callback };

struct LbfgsResult {
  std::vector<double> x;
  double f = 0.0;
  std::vector<double> g;
  double gnorm = 0.0;
  int iterations = 0;
  LbfgsStop stop = LbfgsStop::max_iter;
};

// Returns false where the objective is undefined; the line search treats such
// points as +infinity.
using Objective = std::function<bool(const std::vector<double>& x, double& f,
                                     std::vector<double>& g)>;
// Solves M z = g.
using Preconditioner = std::function<std::vector<double>(const std::vector<double>&)>;
// Called after each accepted step; returning false stops the iteration.
using Callback = std::function<bool(const LbfgsResult&)>;
// Scale factor applied to x after each accepted step (zero-homogeneous only).
using Normalizer = std::function<double(const std::vector<double>&)>;

inline double dotv(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline LbfgsResult lbfgs_minimize(std::vector<double> x0, const Objective& obj,
                                  const Preconditioner& precond, const LbfgsOptions& opt,
                                  const Callback& callback = {},
                                  const Normalizer& normalizer = {}) {
  const std::size_t n = x0.size();
  LbfgsResult st;
  st.x = std::move(x0);
  if (!obj(st.x, st.f, st.g)) {
    st.f = std::numeric_limits<double>::infinity();
    st.stop = LbfgsStop::line_search;
    return st;
  }
  auto metric_norm = [&](const std::vector<double>& g) {
    return std::sqrt(std::max(dotv(g, precond(g)), 0.0));
  };
  st.gnorm = metric_norm(st.g);

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> hist;
  double gamma = 1.0;
  bool first = true;
  std::vector<double> xn(n), gn(n);

  for (st.iterations = 0; st.iterations < opt.max_iter; ++st.iterations) {
    if (st.gnorm <= opt.gtol) {
      st.stop = LbfgsStop::converged;
      return st;
    }

    std::vector<double> q = st.g;
    std::vector<double> alpha(hist.size());
    for (std::size_t k = hist.size(); k-- > 0;) {
      alpha[k] = hist[k].rho * dotv(hist[k].s, q);
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * hist[k].y[i];
    }
    std::vector<double> d = precond(q);
    for (double& v : d) v *= gamma;
    for (std::size_t k = 0; k < hist.size(); ++k) {
      const double beta = hist[k].rho * dotv(hist[k].y, d);
      for (std::size_t i = 0; i < n; ++i) d[i] += hist[k].s[i] * (alpha[k] - beta);
    }
    for (double& v : d) v = -v;

    double gd = dotv(st.g, d);
    if (!(gd < 0.0)) {
      hist.clear();
      d = precond(st.g);
      for (double& v : d) v = -v;
      gd = dotv(st.g, d);
    }
    double step = 1.0;
    if (first || hist.empty()) {
      const double len = std::sqrt(std::max(-gd, 0.0));
      if (len > opt.first_step) step = opt.first_step / len;
    }

    bool accepted = false;
    double fn = 0.0;
    for (int bt = 0; bt < opt.max_backtrack; ++bt) {
      for (std::size_t i = 0; i < n; ++i) xn[i] = st.x[i] + step * d[i];
      if (obj(xn, fn, gn) && std::isfinite(fn)) {
        if (fn <= st.f + opt.armijo * step * gd) {
          accepted = true;
          break;
        }
        // Approximate Wolfe test (Hager and Zhang): once f stops resolving
        // the decrease, the directional derivative decides.
        const double noise = opt.f_noise * std::abs(st.f) +
                             8.0 * std::numeric_limits<double>::epsilon() *
                                 (std::abs(st.f) + std::abs(fn));
        if (fn <= st.f + noise && dotv(gn, d) <= (1.0 - 2.0 * opt.armijo) * -gd) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!hist.empty()) {
        hist.clear();
        gamma = 1.0;
        first = true;
        continue;
      }
      st.stop = LbfgsStop::line_search;
      return st;
    }
    first = false;

    Pair pr;
    pr.s.resize(n);
    pr.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      pr.s[i] = xn[i] - st.x[i];
      pr.y[i] = gn[i] - st.g[i];
    }
    st.x.swap(xn);
    st.g.swap(gn);
    st.f = fn;

    if (opt.zero_homogeneous && normalizer) {
      const double c = normalizer(st.x);
      if (c != 1.0 && std::isfinite(c) && c > 0.0) {
        for (double& v : st.x) v *= c;
        for (double& v : st.g) v /= c;
        for (double& v : pr.s) v *= c;
        for (double& v : pr.y) v /= c;
        for (auto& h : hist) {
          for (double& v : h.s) v *= c;
          for (double& v : h.y) v /= c;
        }
      }
    }

    const double ys = dotv(pr.y, pr.s);
    if (ys > 1e-14 * std::sqrt(dotv(pr.s, pr.s) * dotv(pr.y, pr.y))) {
      pr.rho = 1.0 / ys;
      gamma = ys / dotv(pr.y, precond(pr.y));
      hist.push_back(std::move(pr));
      if (static_cast<int>(hist.size()) > opt.memory) hist.pop_front();
    }

    st.gnorm = metric_norm(st.g);
    if (callback && !callback(st)) {
      ++st.iterations;
      st.stop = LbfgsStop::callback;
      return st;
    }
  }
  st.stop = st.gnorm <= opt.gtol ? LbfgsStop::converged : LbfgsStop::max_iter;
  return st;
}

}  // namespace sbp::detail
