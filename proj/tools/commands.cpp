#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "io.hpp"
#include "sbp/extremal.hpp"
#include "sbp/profiles.hpp"
#include "sbp/version.hpp"

namespace sbp::cli {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class T>
json optional_number(const std::optional<T>& v) {
  return v ? number(*v) : json(nullptr);
}

json coeffs_json(const FiberCoeffs& c) {
  return {{"A", number(c.A)}, {"B", number(c.B)}, {"P", number(c.P)}, {"p", number(c.p)}};
}

std::string profile_csv(const GridPtr& grid, const std::vector<std::pair<std::string, const RadialFunction*>>& cols) {
  std::string s = "r";
  for (const auto& c : cols) s += "," + c.first;
  s += "\n";
  const auto r = grid->r();
  for (std::size_t i = 0; i < r.size(); ++i) {
    s += format_double(r[i]);
    for (const auto& c : cols) s += "," + (c.second ? format_double((*c.second)[i]) : std::string());
    s += "\n";
  }
  return s;
}

// The extremal estimate and Nehari geometry every solver command starts from.
struct Landscape {
  GridPtr grid;
  ExtremalEstimate est;
  double c_emb = 0.0;
  NehariGeometry geometry;
};

Landscape landscape(const RunConfig& config) {
  Landscape l;
  l.grid = config.make_grid();
  SearchConfig search = config.search;
  search.jobs = config.jobs;
  l.est = estimate_extremals(l.grid, config.params, search);
  l.c_emb = estimate_embedding_constant(l.grid, config.params, search);
  l.geometry = nehari_geometry(l.c_emb, config.params.p);
  return l;
}

json geometry_json(const Landscape& l) {
  return {{"embedding_constant", number(l.c_emb)},
          {"c_tilde", number(l.geometry.c_tilde)},
          {"rho", number(l.geometry.rho)},
          {"barrier", number(l.geometry.barrier)}};
}

json certificate_json(const CertificateReport& c) {
  return {{"q", number(c.q)},         {"samples", c.samples},
          {"above", c.above},         {"below", c.below},
          {"at", c.at},               {"violations", c.violations},
          {"max_ratio", number(c.max_ratio)}};
}

json outcome_json(const SolveOutcome& o) {
  if (const auto* r = std::get_if<SolutionRecord>(&o)) return to_json(*r);
  return to_json(std::get<SolveFailure>(o));
}

// Wall time goes to stderr so the written outputs stay deterministic.
void report_time(Clock::time_point t0) {
  std::cerr << "wall time " << seconds_since(t0) << " s\n";
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

FiberCoeffs parse_coeffs(const std::string& text, double p) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--coeffs: cannot parse '" + item + "'");
    }
  }
  if (v.size() != 3) throw ConfigError("--coeffs expects A,B,P");
  return FiberCoeffs{v[0], v[1], v[2], p};
}

RadialFunction parse_profile(const std::string& text, const GridPtr& grid) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("--profile expects family:alpha");
  const std::string family = text.substr(0, colon);
  double alpha = 0.0;
  try {
    alpha = std::stod(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("--profile: cannot parse width in '" + text + "'");
  }
  if (!(alpha > 0.0)) throw ConfigError("--profile width must be positive");
  if (family == "gaussian") return gaussian_profile(grid, alpha);
  if (family == "exponential") return exponential_profile(grid, alpha);
  throw ConfigError("--profile family must be gaussian or exponential");
}

}  // namespace

json to_json(const FiberingReport& r) {
  return {{"case", to_string(r.fiber_case)},
          {"q", number(r.q)},
          {"t_h", number(r.t_h)},
          {"h_min", number(r.h_min)},
          {"t_minus", optional_number(r.t_minus)},
          {"t_plus", optional_number(r.t_plus)},
          {"t_inflect", optional_number(r.t_inflect)},
          {"q_of_u", number(r.q_of_u)},
          {"q0_of_u", number(r.q0_of_u)},
          {"t_of_u", number(r.t_of_u)},
          {"t0_of_u", number(r.t0_of_u)}};
}

json to_json(const ExtremalEstimate& e) {
  return {{"q_star_lb", number(e.q_star_lb)},
          {"q0_star_lb", number(e.q0_star_lb)},
          {"family_tag", e.family_tag},
          {"seed_family", e.seed_family},
          {"seed_alpha", number(e.seed_alpha)},
          {"family_best", number(e.family_best)},
          {"iterations", e.iterations},
          {"converged", e.converged}};
}

json to_json(const SolutionRecord& r) {
  return {{"status", "ok"},
          {"q", number(r.q)},
          {"kind", to_string(r.kind)},
          {"energy",
           {{"total", number(r.energy.total)},
            {"quad", number(r.energy.quad)},
            {"nonlocal", number(r.energy.nonlocal)},
            {"power", number(r.energy.power)}}},
          {"coeffs", coeffs_json(r.coeffs)},
          {"norm", number(std::sqrt(r.coeffs.A))},
          {"residual_norm", number(r.residual_norm)},
          {"nehari",
           {{"class", to_string(r.nehari.cls)},
            {"dpsi1", number(r.nehari.dpsi1)},
            {"d2psi1", number(r.nehari.d2psi1)}}},
          {"mp_level", optional_number(r.mp_level)},
          {"path_max", optional_number(r.path_max)},
          {"iterations", r.iterations}};
}

json to_json(const SolveFailure& f) {
  return {{"status", "failed"},
          {"q", number(f.q)},
          {"failure", to_string(f.kind)},
          {"message", f.message},
          {"last_norm", number(f.last_norm)},
          {"last_residual", number(f.last_residual)},
          {"iterations", f.iterations}};
}

json to_json(const VerifyReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"status", std::string(to_string(c.status))},
                      {"worst_slack", number(c.worst_slack)},
                      {"tolerance", number(c.tolerance)},
                      {"samples", c.samples},
                      {"worst_sample", c.worst_sample},
                      {"refined_slack", optional_number(c.refined_slack)},
                      {"note", c.note}});
  }
  return {{"all_pass", r.all_pass()},
          {"seed", r.seed},
          {"samples", r.samples},
          {"params", {{"p", r.params.p}, {"a", r.params.a}, {"omega", r.params.omega}}},
          {"grid",
           {{"r_max", r.grid.r_max},
            {"n", r.grid.n},
            {"scheme", to_string(r.grid.scheme)},
            {"grading", r.grid.grading}}},
          {"checks", checks}};
}

std::string sweep_csv(const SolutionBranch& branch) {
  std::string s = std::string(kSweepHeader) + "\n";
  auto cell = [](const std::optional<SolutionRecord>& r, auto field) {
    return r ? field(*r) : std::string();
  };
  for (const auto& pt : branch.points) {
    std::string flags;
    for (const auto& f : pt.flags) flags += (flags.empty() ? "" : ";") + f;
    s += format_double(pt.q) + ",";
    s += cell(pt.minimizer, [](const auto& r) { return format_double(r.energy.total); }) + ",";
    s += cell(pt.mountain, [](const auto& r) { return format_double(r.energy.total); }) + ",";
    s += cell(pt.minimizer, [](const auto& r) { return format_double(r.residual_norm); }) + ",";
    s += cell(pt.mountain, [](const auto& r) { return format_double(r.residual_norm); }) + ",";
    s += cell(pt.minimizer, [](const auto& r) { return std::string(to_string(r.nehari.cls)); }) + ",";
    s += cell(pt.mountain, [](const auto& r) { return std::string(to_string(r.nehari.cls)); }) + ",";
    s += format_double(pt.jhat) + "," + flags + "\n";
  }
  return s;
}

int cmd_fiber(const RunConfig& config, const FiberInput& input, double q, std::ostream& out) {
  if (!(q > 0.0)) throw ConfigError("fiber needs --q > 0");
  FiberCoeffs c;
  if (input.coeffs) {
    c = *input.coeffs;
  } else if (!input.profile.empty()) {
    c = fiber_coeffs(parse_profile(input.profile, config.make_grid()), config.params);
  } else {
    throw ConfigError("fiber needs --coeffs A,B,P or --profile family:alpha");
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto rep = classify_fiber(c, q);
  out << "fiber case " << to_string(rep.fiber_case) << " at q = " << format_double(q) << "\n";
  out << "  A = " << format_double(c.A) << "  B = " << format_double(c.B)
      << "  P = " << format_double(c.P) << "  p = " << format_double(c.p) << "\n";
  if (rep.t_minus) out << "  t_minus = " << format_double(*rep.t_minus) << "\n";
  if (rep.t_plus) out << "  t_plus = " << format_double(*rep.t_plus) << "\n";
  if (rep.t_inflect) out << "  t = " << format_double(*rep.t_inflect) << "\n";
  out << "  q(u) = " << format_double(rep.q_of_u) << "  q0(u) = " << format_double(rep.q0_of_u)
      << "\n";
  json j = to_json(rep);
  j["coeffs"] = coeffs_json(c);
  out << dump(j);
  return kOk;
}

int cmd_extremal(const RunConfig& config, std::ostream& out) {
  const auto t0 = Clock::now();
  const auto l = landscape(config);
  const std::size_t n = config.verify.samples;
  const auto high = per_u_certificates(l.grid, config.params, 2.0 * l.est.q_star_lb, n,
                                       config.seed, config.jobs);
  const auto low = per_u_certificates(l.grid, config.params, 0.1 * l.est.q0_star_lb, n,
                                      config.seed, config.jobs);
  json j = to_json(l.est);
  j["geometry"] = geometry_json(l);
  j["certificates"] = {certificate_json(high), certificate_json(low)};
  const std::vector<OutputFile> files{
      {"extremal.json", dump(j)},
      {"maximizer.csv", profile_csv(l.grid, {{"u", &l.est.maximizer}})}};
  write_outputs(config.out_dir, "extremal", to_json(config), config.seed, files);
  report_time(t0);
  out << "q*_lb = " << format_double(l.est.q_star_lb)
      << "  q0*_lb = " << format_double(l.est.q0_star_lb) << "  (" << l.est.family_tag
      << ", " << l.est.iterations << " ascent iterations)\n";
  out << "certificate violations: " << high.violations + low.violations << "\n";
  return high.violations + low.violations == 0 ? kOk : kNumerical;
}

int cmd_solve(const RunConfig& config, std::ostream& out) {
  if (!(config.solve.q > 0.0)) throw ConfigError("solve needs --q > 0");
  const auto t0 = Clock::now();
  const auto l = landscape(config);
  const double q = config.solve.relative ? config.solve.q * l.est.q0_star_lb : config.solve.q;
  const Solver solver(l.grid, config.params, l.geometry, config.solver);

  const auto min = solver.find_minimizer(q, l.est.maximizer);
  std::optional<SolveOutcome> mp;
  if (const auto* u = std::get_if<SolutionRecord>(&min)) mp = solver.mountain_pass(q, *u);

  json j;
  j["q"] = number(q);
  j["q0_star_lb"] = number(l.est.q0_star_lb);
  j["q_star_lb"] = number(l.est.q_star_lb);
  j["geometry"] = geometry_json(l);
  j["minimizer"] = outcome_json(min);
  j["mountain_pass"] = mp ? outcome_json(*mp) : json(nullptr);

  const auto* u = std::get_if<SolutionRecord>(&min);
  const SolutionRecord* w = mp ? std::get_if<SolutionRecord>(&*mp) : nullptr;
  const std::vector<OutputFile> files{
      {"solve.json", dump(j)},
      {"solve_profiles.csv",
       profile_csv(l.grid, {{"u_min", u ? &u->u : nullptr}, {"w_mp", w ? &w->u : nullptr}})}};
  write_outputs(config.out_dir, "solve", to_json(config), config.seed, files);
  report_time(t0);

  out << "q = " << format_double(q) << "\n";
  if (u) {
    out << "  minimizer: J = " << format_double(u->energy.total) << " (" << to_string(u->kind)
        << ", nehari " << to_string(u->nehari.cls) << ", residual "
        << format_double(u->residual_norm) << ")\n";
  } else {
    out << "  minimizer failed: " << std::get<SolveFailure>(min).message << "\n";
  }
  if (w) {
    out << "  mountain pass: J = " << format_double(w->energy.total) << " (nehari "
        << to_string(w->nehari.cls) << ", residual " << format_double(w->residual_norm) << ")\n";
  } else if (mp) {
    out << "  mountain pass failed: " << std::get<SolveFailure>(*mp).message << "\n";
  }
  return u && w ? kOk : kNumerical;
}

int cmd_sweep(const RunConfig& config, std::ostream& out) {
  const auto t0 = Clock::now();
  const auto l = landscape(config);
  const double unit = config.sweep.relative ? l.est.q0_star_lb : 1.0;
  const Solver solver(l.grid, config.params, l.geometry, config.solver);
  BranchConfig bc;
  bc.q_lo = config.sweep.q_lo * unit;
  bc.q_hi = config.sweep.q_hi * unit;
  bc.steps = config.sweep.steps;
  bc.jobs = config.jobs;
  bc.q0_reference = l.est.q0_star_lb;
  const auto branch = continue_branch(solver, bc, l.est.maximizer);
  const std::string csv = sweep_csv(branch);
  write_outputs(config.out_dir, "sweep", to_json(config), config.seed, {{"sweep.csv", csv}});
  report_time(t0);
  out << csv;
  return kOk;
}

int cmd_verify(const RunConfig& config, std::ostream& out) {
  const auto t0 = Clock::now();
  SuiteOptions opt;
  opt.coercivity_q = config.verify.coercivity_q;
  opt.refinement = config.verify.refinement;
  opt.jobs = config.jobs;
  opt.kernel_scale = config.verify.kernel_scale;
  const auto rep =
      run_suite(config.params, config.make_grid(), config.seed, config.verify.samples, opt);
  write_outputs(config.out_dir, "verify", to_json(config), config.seed,
                {{"verify.json", dump(to_json(rep))}});
  report_time(t0);
  for (const auto& c : rep.checks) {
    out << to_string(c.status) << "  " << c.name << "  worst slack "
        << format_double(c.worst_slack) << " (tolerance " << format_double(c.tolerance) << ")";
    if (!c.worst_sample.empty()) out << " at " << c.worst_sample;
    out << "\n";
  }
  return rep.all_pass() ? kOk : kVerification;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical toolkit for the Schrodinger-Bopp-Podolsky system", "sbpkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  struct Flags {
    std::string config;
    std::optional<double> q, p, a, omega;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
    std::optional<std::string> out;
    std::string coeffs, profile;
    bool relative = false;
    std::optional<double> q_lo, q_hi, kernel_scale;
    std::optional<int> steps;
    std::optional<std::size_t> samples;
  } f;

  auto common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--p", f.p, "nonlinearity exponent in (2, 3]");
    sub->add_option("--a", f.a, "Bopp-Podolsky length a >= 0");
    sub->add_option("--omega", f.omega, "frequency omega > 0");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--jobs", f.jobs, "worker threads");
    sub->add_option("--out", f.out, "output directory");
  };

  auto* fiber = app.add_subcommand("fiber", "classify the fiber map of one profile");
  common(fiber);
  fiber->add_option("--q", f.q, "charge")->required();
  auto* coeffs = fiber->add_option("--coeffs", f.coeffs, "A,B,P");
  fiber->add_option("--profile", f.profile, "gaussian:alpha or exponential:alpha")
      ->excludes(coeffs);

  auto* extremal = app.add_subcommand("extremal", "estimate q* and q0* from below");
  common(extremal);

  auto* solve = app.add_subcommand("solve", "minimizer and mountain-pass point at one q");
  common(solve);
  solve->add_option("--q", f.q, "charge");
  solve->add_flag("--relative", f.relative, "read --q in units of q0*_lb");

  auto* sweep = app.add_subcommand("sweep", "continue both branches over a range of q");
  common(sweep);
  sweep->add_option("--q-lo", f.q_lo, "lower end of the range");
  sweep->add_option("--q-hi", f.q_hi, "upper end of the range");
  sweep->add_option("--steps", f.steps, "number of q values");

  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  common(verify);
  verify->add_option("--samples", f.samples, "random profiles");
  verify->add_option("--kernel-scale", f.kernel_scale, "fault injection: scale the kernel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "sbpkit: " << e.what() << "\n";
    if (e.get_exit_code() == 0) return kOk;
    err << "run 'sbpkit --help' for usage\n";
    return kUsage;
  }

  try {
    RunConfig config = f.config.empty() ? RunConfig{} : load_config(f.config);
    if (f.p) config.params.p = *f.p;
    if (f.a) config.params.a = *f.a;
    if (f.omega) config.params.omega = *f.omega;
    if (f.seed) config.seed = *f.seed;
    if (f.jobs) config.jobs = *f.jobs;
    if (f.out) config.out_dir = *f.out;
    if (f.samples) config.verify.samples = *f.samples;
    if (f.kernel_scale) config.verify.kernel_scale = *f.kernel_scale;
    if (f.q_lo) config.sweep.q_lo = *f.q_lo;
    if (f.q_hi) config.sweep.q_hi = *f.q_hi;
    if (f.steps) config.sweep.steps = *f.steps;
    if (*solve && f.q) {
      config.solve.q = *f.q;
      config.solve.relative = f.relative;
    }
    config.validate();

    if (*fiber) {
      FiberInput in;
      if (!f.coeffs.empty()) in.coeffs = parse_coeffs(f.coeffs, config.params.p);
      in.profile = f.profile;
      return cmd_fiber(config, in, *f.q, out);
    }
    if (*extremal) return cmd_extremal(config, out);
    if (*solve) return cmd_solve(config, out);
    if (*sweep) return cmd_sweep(config, out);
    return cmd_verify(config, out);
  } catch (const ConfigError& e) {
    err << "sbpkit: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "sbpkit: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "sbpkit: numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace sbp::cli
