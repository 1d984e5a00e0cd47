#include "config.hpp"

#include <fstream>
#include <set>

namespace sbp::cli {

using nlohmann::json;

namespace {

// Reads the keys of `j` into the matching fields, rejecting anything else.
class Reader {
public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }
  void done() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
    }
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }
  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void RunConfig::validate() const {
  try {
    params.validate();
    solver.validate();
    search.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  require(grid.r_max > 0.0, "grid.r_max must be positive");
  require(grid.n >= 16, "grid.n must be at least 16");
  require(grid.grading > 0.0, "grid.grading must be positive");
  require(solve.q >= 0.0, "solve.q must be nonnegative");
  require(sweep.q_lo > 0.0 && sweep.q_hi >= sweep.q_lo, "sweep needs 0 < q_lo <= q_hi");
  require(sweep.steps >= 2 || sweep.q_hi == sweep.q_lo, "sweep.steps must be at least 2");
  require(verify.samples > 0, "verify.samples must be positive");
  require(verify.coercivity_q > 0.0, "verify.coercivity_q must be positive");
  require(verify.kernel_scale > 0.0, "verify.kernel_scale must be positive");
  require(jobs >= 1, "jobs must be at least 1");
  require(!out_dir.empty(), "out_dir must not be empty");
}

GridPtr RunConfig::make_grid() const {
  return sbp::make_grid(grid.r_max, grid.n, grid.scheme, grid.grading);
}

json to_json(const RunConfig& c) {
  json j;
  j["params"] = {{"p", c.params.p}, {"a", c.params.a}, {"omega", c.params.omega}};
  j["grid"] = {{"r_max", c.grid.r_max},
               {"n", c.grid.n},
               {"scheme", to_string(c.grid.scheme)},
               {"grading", c.grid.grading}};
  j["solver"] = {{"tol", c.solver.tol},
                 {"max_iter", c.solver.max_iter},
                 {"memory", c.solver.memory},
                 {"collapse_fraction", c.solver.collapse_fraction},
                 {"path_nodes", c.solver.path_nodes},
                 {"path_iter", c.solver.path_iter},
                 {"path_tol", c.solver.path_tol},
                 {"nehari_tol", c.solver.nehari_tol}};
  j["search"] = {{"family_points", c.search.family_points},
                 {"gauss_alpha_min", c.search.gauss_alpha_min},
                 {"gauss_alpha_max", c.search.gauss_alpha_max},
                 {"exp_alpha_min", c.search.exp_alpha_min},
                 {"exp_alpha_max", c.search.exp_alpha_max},
                 {"exponential_family", c.search.exponential_family},
                 {"ascent_iterations", c.search.ascent_iterations},
                 {"ascent_tol", c.search.ascent_tol}};
  j["solve"] = {{"q", c.solve.q}, {"relative", c.solve.relative}};
  j["sweep"] = {{"q_lo", c.sweep.q_lo},
                {"q_hi", c.sweep.q_hi},
                {"steps", c.sweep.steps},
                {"relative", c.sweep.relative}};
  j["verify"] = {{"samples", c.verify.samples},
                 {"coercivity_q", c.verify.coercivity_q},
                 {"refinement", c.verify.refinement},
                 {"kernel_scale", c.verify.kernel_scale}};
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["out_dir"] = c.out_dir;
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  Reader top(j, "config");
  if (const json* s = top.child("params")) {
    Reader r(*s, "params");
    r.get("p", c.params.p);
    r.get("a", c.params.a);
    r.get("omega", c.params.omega);
    r.done();
  }
  if (const json* s = top.child("grid")) {
    Reader r(*s, "grid");
    r.get("r_max", c.grid.r_max);
    r.get("n", c.grid.n);
    std::string scheme = to_string(c.grid.scheme);
    r.get("scheme", scheme);
    try {
      c.grid.scheme = grid_scheme_from_string(scheme);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("grid.scheme: ") + e.what());
    }
    r.get("grading", c.grid.grading);
    r.done();
  }
  if (const json* s = top.child("solver")) {
    Reader r(*s, "solver");
    r.get("tol", c.solver.tol);
    r.get("max_iter", c.solver.max_iter);
    r.get("memory", c.solver.memory);
    r.get("collapse_fraction", c.solver.collapse_fraction);
    r.get("path_nodes", c.solver.path_nodes);
    r.get("path_iter", c.solver.path_iter);
    r.get("path_tol", c.solver.path_tol);
    r.get("nehari_tol", c.solver.nehari_tol);
    r.done();
  }
  if (const json* s = top.child("search")) {
    Reader r(*s, "search");
    r.get("family_points", c.search.family_points);
    r.get("gauss_alpha_min", c.search.gauss_alpha_min);
    r.get("gauss_alpha_max", c.search.gauss_alpha_max);
    r.get("exp_alpha_min", c.search.exp_alpha_min);
    r.get("exp_alpha_max", c.search.exp_alpha_max);
    r.get("exponential_family", c.search.exponential_family);
    r.get("ascent_iterations", c.search.ascent_iterations);
    r.get("ascent_tol", c.search.ascent_tol);
    r.done();
  }
  if (const json* s = top.child("solve")) {
    Reader r(*s, "solve");
    r.get("q", c.solve.q);
    r.get("relative", c.solve.relative);
    r.done();
  }
  if (const json* s = top.child("sweep")) {
    Reader r(*s, "sweep");
    r.get("q_lo", c.sweep.q_lo);
    r.get("q_hi", c.sweep.q_hi);
    r.get("steps", c.sweep.steps);
    r.get("relative", c.sweep.relative);
    r.done();
  }
  if (const json* s = top.child("verify")) {
    Reader r(*s, "verify");
    r.get("samples", c.verify.samples);
    r.get("coercivity_q", c.verify.coercivity_q);
    r.get("refinement", c.verify.refinement);
    r.get("kernel_scale", c.verify.kernel_scale);
    r.done();
  }
  top.get("seed", c.seed);
  top.get("jobs", c.jobs);
  top.get("out_dir", c.out_dir);
  top.done();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(j);
}

std::string canonical(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

}  // namespace sbp::cli
