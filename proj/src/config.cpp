#include "fastlim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "fastlim/diagnostics.hpp"
#include "fastlim/ini.hpp"
#include "fastlim/kinetics.hpp"

namespace fastlim {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

Parameters read_parameters(ConfigReader& r, std::vector<std::string>& warnings) {
  r.allow_section("parameters");
  Parameters p;
  p.d1 = r.get_double("parameters", "d1");
  p.d2 = r.get_double("parameters", "d2");
  p.d3 = r.get_double("parameters", "d3");
  p.r0 = r.get_double("parameters", "r0");
  p.eta = r.get_double("parameters", "eta");
  p.alpha = r.get_double("parameters", "alpha");
  p.xi = r.get_double("parameters", "xi");
  p.gamma = r.get_double("parameters", "gamma");
  p.Gamma = r.get_double("parameters", "Gamma");
  p.mu = r.get_double("parameters", "mu");
  p.eps = r.get_double("parameters", "eps", 1.0);
  p.p_energy = r.get_double("parameters", "p_energy", p.xi > 0 ? 2.0 : 1.1);
  const bool allow_d3_ge_d2 = r.get_bool("parameters", "allow_d3_ge_d2", false);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(e.what()) + " (section [parameters])");
  }
  if (!allow_d3_ge_d2) {
    for (const std::string& w : p.warnings()) warnings.push_back(w);
  }
  return p;
}

Grid read_grid(ConfigReader& r) {
  r.allow_section("grid");
  const int dim = static_cast<int>(r.get_int("grid", "dim", 1));
  try {
    if (dim == 1) {
      return Grid::line(static_cast<int>(r.get_int("grid", "cells", 0)),
                        r.get_double("grid", "extent"));
    }
    if (dim == 2) {
      return Grid::rect(static_cast<int>(r.get_int("grid", "cells", 0)),
                        static_cast<int>(r.get_int("grid", "cells_y", 0)),
                        r.get_double("grid", "extent"),
                        r.get_double("grid", "extent_y"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(e.what()) + " (section [grid])");
  }
  throw ConfigError("grid.dim: must be 1 or 2");
}

SolverConfig read_solver(ConfigReader& r, double& cross_slope_bound) {
  r.allow_section("solver");
  SolverConfig cfg;
  cfg.dt = r.get_double("solver", "dt");
  cfg.t_end = r.get_double("solver", "t_end");
  cfg.output_stride = static_cast<int>(r.get_int("solver", "output_stride", 1));
  try {
    cfg.splitting = splitting_from_name(r.get_string("solver", "splitting", "strang"));
    cfg.diffusion = diffusion_from_name(r.get_string("solver", "diffusion", "implicit"));
    cross_slope_bound = r.get_double("solver", "cross_slope_bound", 1.0);
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(e.what()) + " (section [solver])");
  }
  if (!(cross_slope_bound > 0)) throw ConfigError("solver.cross_slope_bound: must be > 0");
  return cfg;
}

Expr read_expr(ConfigReader& r, const std::string& sec, const std::string& key) {
  const std::string text = r.get_string(sec, key);
  try {
    return Expr::parse(text);
  } catch (const std::invalid_argument& e) {
    r.fail_at(sec, key, e.what());
  }
}

InitialData read_initial(ConfigReader& r) {
  r.allow_section("initial");
  InitialData init;
  init.N = read_expr(r, "initial", "N");
  const bool has_P = r.has("initial", "P");
  const bool has_split = r.has("initial", "ps") || r.has("initial", "ph");
  if (has_P && has_split) {
    throw ConfigError("[initial]: give either P (manifold split) or ps/ph, not both");
  }
  if (has_P) {
    init.P = read_expr(r, "initial", "P");
    init.on_manifold = true;
  } else if (has_split) {
    init.ps = read_expr(r, "initial", "ps");
    init.ph = read_expr(r, "initial", "ph");
    init.on_manifold = false;
  } else {
    throw ConfigError("[initial]: missing predator data (P or ps/ph)");
  }
  init.noise_amp = r.get_double("initial", "noise_amp", 0.0);
  if (init.noise_amp < 0) r.fail_at("initial", "noise_amp", "must be >= 0");
  init.seed = static_cast<std::uint64_t>(r.get_int("initial", "seed", 0));
  return init;
}

DiagnosticsCfg read_diagnostics(ConfigReader& r) {
  r.allow_section("diagnostics");
  DiagnosticsCfg d;
  if (!r.has_section("diagnostics")) return d;
  d.energy = r.get_bool("diagnostics", "energy", true);
  if (r.has("diagnostics", "energy_p")) d.energy_p = r.get_double("diagnostics", "energy_p");
  const std::string beta = r.get_string("diagnostics", "energy_beta", "auto");
  if (beta == "auto") {
    d.beta_mode = EnergyBetaMode::schedule_by_branch;
  } else if (beta == "zero") {
    d.beta_mode = EnergyBetaMode::zero;
  } else {
    char* end = nullptr;
    d.beta_value = std::strtod(beta.c_str(), &end);
    if (end == beta.c_str() || *end != '\0' || d.beta_value < 0) {
      r.fail_at("diagnostics", "energy_beta", "expected 'auto', 'zero', or a number >= 0");
    }
    d.beta_mode = EnergyBetaMode::fixed;
  }
  d.snapshot_stride = static_cast<int>(r.get_int("diagnostics", "snapshot_stride", 0));
  if (d.snapshot_stride < 0) r.fail_at("diagnostics", "snapshot_stride", "must be >= 0");
  return d;
}

RunConfig read_run_sections(ConfigReader& r) {
  RunConfig cfg;
  cfg.prm = read_parameters(r, cfg.warnings);
  cfg.grid = read_grid(r);
  cfg.solver = read_solver(r, cfg.cross_slope_bound);
  cfg.init = read_initial(r);
  cfg.diag = read_diagnostics(r);
  return cfg;
}

} // namespace

RunConfig parse_run_config(const std::string& text) {
  ConfigReader r(IniDocument::parse(text));
  RunConfig cfg = read_run_sections(r);
  r.finish();
  return cfg;
}

ExperimentPlan parse_plan(const std::string& text) {
  ConfigReader r(IniDocument::parse(text));
  ExperimentPlan plan;
  plan.run = read_run_sections(r);

  r.allow_section("sweep");
  plan.eps_list = r.get_double_list("sweep", "eps_list");
  plan.compare_limit = r.get_bool("sweep", "compare_limit", true);
  plan.drop_plateau = r.get_bool("sweep", "drop_plateau", true);
  plan.norm_t0 = r.get_double("sweep", "norm_t0", 0.0);
  plan.out_dir = r.get_string("sweep", "out_dir", "out");
  plan.seed = static_cast<std::uint64_t>(r.get_int("sweep", "seed", 0));
  plan.jobs = static_cast<int>(r.get_int("sweep", "jobs", 1));
  plan.allow_off_manifold = r.get_bool("sweep", "allow_off_manifold", false);

  r.allow_section("acceptance");
  if (r.has_section("acceptance")) {
    if (r.has("acceptance", "min_slope")) {
      plan.thresholds.min_slope = r.get_double("acceptance", "min_slope");
    }
    plan.thresholds.require_monotone_residual =
        r.get_bool("acceptance", "require_monotone_residual", true);
    plan.thresholds.require_monotone_limit_gap =
        r.get_bool("acceptance", "require_monotone_limit_gap", plan.compare_limit);
  }

  r.allow_section("duality");
  if (r.has_section("duality")) {
    DualityInput d;
    d.c_mr = r.get_double("duality", "c_mr");
    d.q0_prime = r.get_double("duality", "q0_prime");
    plan.duality = d;
  }

  r.finish();
  plan.validate();
  return plan;
}

void ExperimentPlan::validate() const {
  if (eps_list.size() < 3) throw ConfigError("sweep.eps_list: need at least 3 entries");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0)) throw ConfigError("sweep.eps_list: entries must be > 0");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
      throw ConfigError("sweep.eps_list: entries must be strictly decreasing");
    }
  }
  if (jobs < 1) throw ConfigError("sweep.jobs: must be >= 1");
  if (norm_t0 < 0 || norm_t0 >= run.solver.t_end) {
    throw ConfigError("sweep.norm_t0: must lie in [0, t_end)");
  }
  if (compare_limit && !run.init.on_manifold && !allow_off_manifold) {
    throw ConfigError("sweep: limit comparison with an explicit ps/ph split needs "
                      "allow_off_manifold = true");
  }
  if (duality) {
    // Range-checks q0'; throws on bad input.
    check_duality_condition(run.prm, duality->c_mr, duality->q0_prime);
  }
}

InitialFields build_initial_fields(const InitialData& init, const Grid& g,
                                   const Parameters& prm) {
  InitialFields f;
  f.N = make_field(g);
  f.P = make_field(g);
  f.ps = make_field(g);
  f.ph = make_field(g);

  auto eval_on_grid = [&](const Expr& e, Field& out) {
    for (int iy = 0; iy < (g.dim == 2 ? g.ny : 1); ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        const std::size_t k = static_cast<std::size_t>(iy) * g.nx + ix;
        out[k] = e.eval(g.x_center(ix), g.dim == 2 ? g.y_center(iy) : 0.0, g.Lx, g.Ly);
      }
    }
  };

  eval_on_grid(init.N, f.N);
  if (init.on_manifold) {
    eval_on_grid(init.P, f.P);
  } else {
    eval_on_grid(init.ps, f.ps);
    eval_on_grid(init.ph, f.ph);
    for (std::size_t i = 0; i < g.size(); ++i) f.P[i] = f.ps[i] + f.ph[i];
  }

  if (init.noise_amp > 0) {
    std::mt19937_64 rng(init.seed);
    std::uniform_real_distribution<double> u(-init.noise_amp, init.noise_amp);
    for (double& v : f.N) v = std::max(0.0, v + u(rng));
    if (init.on_manifold) {
      for (double& v : f.P) v = std::max(0.0, v + u(rng));
    } else {
      for (double& v : f.ps) v = std::max(0.0, v + u(rng));
      for (double& v : f.ph) v = std::max(0.0, v + u(rng));
      for (std::size_t i = 0; i < g.size(); ++i) f.P[i] = f.ps[i] + f.ph[i];
    }
  }

  for (std::size_t i = 0; i < g.size(); ++i) {
    f.N[i] = clamp_nonneg(f.N[i], "initial N");
    if (init.on_manifold) {
      f.P[i] = clamp_nonneg(f.P[i], "initial P");
      f.ph[i] = phi(f.N[i], f.P[i], prm);
      f.ps[i] = f.P[i] - f.ph[i];
    } else {
      f.ps[i] = clamp_nonneg(f.ps[i], "initial ps");
      f.ph[i] = clamp_nonneg(f.ph[i], "initial ph");
    }
  }
  return f;
}

FastState initial_fast_state(const InitialFields& f) {
  FastState s;
  s.t = 0;
  s.N = f.N;
  s.ps = f.ps;
  s.ph = f.ph;
  return s;
}

LimitState initial_limit_state(const InitialFields& f) {
  LimitState s;
  s.t = 0;
  s.N = f.N;
  s.P = f.P;
  return s;
}

double effective_energy_p(const DiagnosticsCfg& d, const Parameters& prm) {
  if (d.energy_p) return *d.energy_p;
  return prm.xi > 0 ? 2.0 : 1.1;
}

double effective_energy_beta(const DiagnosticsCfg& d, const Parameters& prm, double p) {
  switch (d.beta_mode) {
    case EnergyBetaMode::zero:
      return 0.0;
    case EnergyBetaMode::fixed:
      return d.beta_value;
    case EnergyBetaMode::schedule_by_branch:
      break;
  }
  if (prm.xi > 0) return 0.0;
  return beta_schedule(prm.eps, std::min(p, 2.0));
}

} // namespace fastlim
