#include "fastlim/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <limits>
#include <sstream>

#include "fastlim/diagnostics.hpp"
#include "fastlim/snapshot.hpp"
#include "fastlim/svg.hpp"

namespace fastlim {

namespace {

namespace fs = std::filesystem;

std::string eps_label(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", eps);
  return buf;
}

// Trapezoid-in-time accumulator for space-time integrals fed per step.
struct TimeIntegral {
  double t0 = 0; // exclude segments starting before t0
  bool have_prev = false;
  double prev_t = 0, prev_v = 0;
  double integral = 0;

  void add(double t, double v) {
    if (have_prev && prev_t >= t0) {
      integral += 0.5 * (t - prev_t) * (prev_v + v);
    }
    have_prev = true;
    prev_t = t;
    prev_v = v;
  }
};

struct DiagCsv {
  std::ostringstream rows;
  void add(double t, const char* name, double value) {
    rows << fmt17(t) << "," << name << "," << fmt17(value) << "\n";
  }
  void write(const std::string& path) {
    atomic_write_file(path, "t,name,value\n" + rows.str());
  }
};

struct FastRunOutput {
  FastTrajectory traj;
  EpsRunRow row;
};

int auto_snapshot_stride(const SolverConfig& cfg, int requested) {
  if (requested > 0) return requested;
  const long long n_steps = std::max(1LL, std::llround(cfg.t_end / cfg.dt));
  const long long emissions = n_steps / cfg.output_stride + 1;
  return static_cast<int>(std::max(1LL, emissions / 10));
}

FastRunOutput run_one_fast(const RunConfig& cfg, const InitialFields& init,
                           double eps, double norm_t0, const std::string& out_dir) {
  FastRunOutput out;
  out.row.eps = eps;

  Parameters prm = cfg.prm;
  prm.eps = eps;
  const double energy_p = effective_energy_p(cfg.diag, prm);
  const double energy_beta = effective_energy_beta(cfg.diag, prm, energy_p);

  fs::create_directories(out_dir);

  DiagCsv csv;
  TimeIntegral res_sq{norm_t0}, res_p43{norm_t0};
  std::vector<double> series_t, series_res;
  double min_field = std::numeric_limits<double>::infinity();
  double max_N = -std::numeric_limits<double>::infinity();
  double m_estimate = std::numeric_limits<double>::infinity();
  long mass_violations = 0;
  double min_diss_b0 = std::numeric_limits<double>::infinity();
  int sign_cells_max = 0;
  double h0 = 0, energy_excess = 0;
  bool first = true;

  FastHooks hooks;
  hooks.energy.enabled = cfg.diag.energy;
  hooks.energy.p = energy_p;
  hooks.energy.beta = energy_beta;
  hooks.on_diag = [&](const FastStepDiag& d) {
    res_sq.add(d.t, d.residual_sq_int);
    res_p43.add(d.t, d.residual_p43_int);
    series_t.push_back(d.t);
    series_res.push_back(std::sqrt(d.residual_sq_int));
    min_field = std::min({min_field, d.min_N, d.min_ps, d.min_ph});
    max_N = std::max(max_N, d.max_N);
    m_estimate = std::min(m_estimate, d.min_N);
    if (!first && d.mass_ineq_defect > d.mass_ineq_tol) ++mass_violations;
    min_diss_b0 = std::min(min_diss_b0, d.dissipation_beta0);
    sign_cells_max = std::max(sign_cells_max, d.dissipation_sign_cells);
    if (first) {
      h0 = d.energy;
      first = false;
    }
    energy_excess = std::max(energy_excess, d.energy - h0);

    csv.add(d.t, "mass_N", d.mass_N);
    csv.add(d.t, "mass_predators", d.mass_ps + d.mass_ph);
    csv.add(d.t, "mass_ph", d.mass_ph);
    csv.add(d.t, "min_N", d.min_N);
    csv.add(d.t, "max_N", d.max_N);
    csv.add(d.t, "min_ps", d.min_ps);
    csv.add(d.t, "min_ph", d.min_ph);
    csv.add(d.t, "residual_l2_x", std::sqrt(d.residual_sq_int));
    csv.add(d.t, "energy", d.energy);
    csv.add(d.t, "dissipation", d.dissipation);
    csv.add(d.t, "dissipation_beta0", d.dissipation_beta0);
    csv.add(d.t, "dissipation_sign_cells", d.dissipation_sign_cells);
    csv.add(d.t, "mass_ineq_defect", d.mass_ineq_defect);
    csv.add(d.t, "dNdt_abs_int", d.dNdt_abs_int);
    csv.add(d.t, "dNdt_int", d.dNdt_int);
    csv.add(d.t, "m_estimate", d.min_N);
  };

  const int snap_stride = auto_snapshot_stride(cfg.solver, cfg.diag.snapshot_stride);
  long emit_count = 0;
  hooks.on_emit = [&](const FastState& st) {
    if (emit_count % snap_stride == 0) {
      char name[48];
      std::snprintf(name, sizeof(name), "snapshot_%06ld.csv", emit_count);
      write_fast_snapshot(out_dir + "/" + name, cfg.grid, st, prm);
    }
    ++emit_count;
  };
  hooks.on_abort = [&](const FastTrajectory&) { csv.write(out_dir + "/diagnostics.csv"); };

  FastState init_state = initial_fast_state(init);
  out.traj = integrate_fast(init_state, cfg.grid, cfg.solver, prm, hooks);
  csv.write(out_dir + "/diagnostics.csv");
  if (series_t.size() >= 2) {
    atomic_write_file(out_dir + "/residual_timeseries.svg",
                      emit_timeseries_svg("slow-manifold residual, spatial L2", series_t,
                                          series_res));
  }

  out.row.ok = true;
  out.row.residual_norm = prm.xi > 0 ? std::sqrt(res_sq.integral)
                                     : std::pow(res_p43.integral, 3.0 / 4.0);
  out.row.min_field = min_field;
  out.row.max_N = max_N;
  out.row.m_estimate = m_estimate;
  out.row.mass_ineq_violations = mass_violations;
  out.row.min_dissipation_beta0 = min_diss_b0;
  out.row.dissipation_sign_cells_max = sign_cells_max;
  out.row.energy_excess = energy_excess;
  return out;
}

struct LimitRunOutput {
  LimitTrajectory traj;
  double min_field = std::numeric_limits<double>::infinity();
  double max_N = -std::numeric_limits<double>::infinity();
  long mass_ineq_violations = 0;
};

LimitRunOutput run_one_limit(const RunConfig& cfg, const InitialFields& init,
                             const std::string& out_dir) {
  LimitRunOutput out;
  fs::create_directories(out_dir);

  DiagCsv csv;
  std::vector<double> series_t, series_mass;
  bool first = true;
  LimitHooks hooks;
  hooks.on_diag = [&](const LimitStepDiag& d) {
    out.min_field = std::min({out.min_field, d.min_N, d.min_P});
    out.max_N = std::max(out.max_N, d.max_N);
    if (!first && d.mass_ineq_defect > d.mass_ineq_tol) ++out.mass_ineq_violations;
    first = false;
    series_t.push_back(d.t);
    series_mass.push_back(d.mass_P);
    csv.add(d.t, "mass_N", d.mass_N);
    csv.add(d.t, "mass_P", d.mass_P);
    csv.add(d.t, "phi_mass", d.phi_mass);
    csv.add(d.t, "min_N", d.min_N);
    csv.add(d.t, "max_N", d.max_N);
    csv.add(d.t, "min_P", d.min_P);
    csv.add(d.t, "max_P", d.max_P);
    csv.add(d.t, "mass_ineq_defect", d.mass_ineq_defect);
  };
  const int snap_stride = auto_snapshot_stride(cfg.solver, cfg.diag.snapshot_stride);
  long emit_count = 0;
  hooks.on_emit = [&](const LimitState& st) {
    if (emit_count % snap_stride == 0) {
      char name[48];
      std::snprintf(name, sizeof(name), "snapshot_%06ld.csv", emit_count);
      write_limit_snapshot(out_dir + "/" + name, cfg.grid, st, cfg.prm);
    }
    ++emit_count;
  };
  hooks.on_abort = [&](const LimitTrajectory&) { csv.write(out_dir + "/diagnostics.csv"); };

  LimitState init_state = initial_limit_state(init);
  out.traj = integrate_limit(init_state, cfg.grid, cfg.solver, cfg.prm, hooks,
                             cfg.cross_slope_bound);
  csv.write(out_dir + "/diagnostics.csv");
  if (series_t.size() >= 2) {
    atomic_write_file(out_dir + "/mass_timeseries.svg",
                      emit_timeseries_svg("total predator mass", series_t, series_mass));
  }
  return out;
}

// Drops leading states with t < t0 (used to exclude the initial layer).
template <class Traj>
Traj trim_before(const Traj& traj, double t0) {
  if (t0 <= traj.states.front().t) return traj;
  Traj out;
  out.grid = traj.grid;
  for (const auto& s : traj.states) {
    if (s.t >= t0) out.states.push_back(s);
  }
  return out;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (!(v[i + 1] < v[i])) return false;
  }
  return true;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

} // namespace

LimitComparison compare_to_limit(const FastTrajectory& fast,
                                 const LimitTrajectory& limit,
                                 const Parameters& prm) {
  if (!fast.grid.same_as(limit.grid)) {
    throw std::invalid_argument("compare_to_limit: trajectories live on different grids");
  }
  if (fast.states.size() != limit.states.size() || fast.states.size() < 2) {
    throw std::invalid_argument("compare_to_limit: emission times differ");
  }
  for (std::size_t k = 0; k < fast.states.size(); ++k) {
    if (std::abs(fast.states[k].t - limit.states[k].t) >
        1e-12 * (1.0 + std::abs(fast.states[k].t))) {
      throw std::invalid_argument("compare_to_limit: emission times differ");
    }
  }

  const Grid& g = fast.grid;
  const double vol = g.cell_volume();
  const std::size_t levels = fast.states.size();
  std::vector<double> dn(levels), dp(levels), dphi(levels);
  for (std::size_t k = 0; k < levels; ++k) {
    const FastState& f = fast.states[k];
    const LimitState& l = limit.states[k];
    double sn = 0, sp = 0, sphi = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double en = f.N[i] - l.N[i];
      const double ep = (f.ps[i] + f.ph[i]) - l.P[i];
      const double ephi = f.ph[i] - phi(l.N[i], l.P[i], prm);
      sn += en * en;
      sp += ep * ep;
      sphi += ephi * ephi;
    }
    dn[k] = sn * vol;
    dp[k] = sp * vol;
    dphi[k] = sphi * vol;
  }
  auto trapz = [&](const std::vector<double>& v) {
    double s = 0;
    for (std::size_t k = 0; k + 1 < levels; ++k) {
      s += 0.5 * (fast.states[k + 1].t - fast.states[k].t) * (v[k] + v[k + 1]);
    }
    return std::sqrt(s);
  };
  return LimitComparison{trapz(dn), trapz(dp), trapz(dphi)};
}

SweepResult run_sweep(const ExperimentPlan& plan, const std::string& out_dir,
                      int jobs) {
  plan.validate();
  fs::create_directories(out_dir);

  SweepResult result;
  const std::size_t n_eps = plan.eps_list.size();
  std::vector<std::optional<FastRunOutput>> outputs(n_eps);
  std::vector<std::string> failures(n_eps);

  const InitialFields init =
      build_initial_fields(plan.run.init, plan.run.grid, plan.run.prm);

  auto worker = [&](std::size_t idx) {
    const double eps = plan.eps_list[idx];
    const std::string dir = out_dir + "/eps_" + eps_label(eps);
    try {
      outputs[idx] = run_one_fast(plan.run, init, eps, plan.norm_t0, dir);
    } catch (const std::exception& e) {
      failures[idx] = e.what();
    }
  };

  const int effective_jobs = std::max(1, jobs);
  for (std::size_t base = 0; base < n_eps; base += effective_jobs) {
    std::vector<std::future<void>> batch;
    for (std::size_t i = base; i < std::min(base + effective_jobs, n_eps); ++i) {
      batch.push_back(std::async(std::launch::async, worker, i));
    }
    for (auto& f : batch) f.get();
  }

  std::optional<LimitRunOutput> limit_out;
  std::string limit_failure;
  if (plan.compare_limit) {
    try {
      limit_out = run_one_limit(plan.run, init, out_dir + "/limit");
      result.limit_min_field = limit_out->min_field;
      result.limit_max_N = limit_out->max_N;
      result.limit_mass_ineq_violations = limit_out->mass_ineq_violations;
    } catch (const std::exception& e) {
      limit_failure = e.what();
    }
  }

  for (std::size_t i = 0; i < n_eps; ++i) {
    if (outputs[i]) {
      EpsRunRow row = outputs[i]->row;
      if (limit_out) {
        const FastTrajectory ft = trim_before(outputs[i]->traj, plan.norm_t0);
        const LimitTrajectory lt = trim_before(limit_out->traj, plan.norm_t0);
        Parameters prm = plan.run.prm;
        prm.eps = row.eps;
        row.vs_limit = compare_to_limit(ft, lt, prm);
      }
      result.rows.push_back(row);
    } else {
      EpsRunRow row;
      row.eps = plan.eps_list[i];
      row.ok = false;
      row.message = failures[i].empty() ? "failed" : failures[i];
      result.rows.push_back(row);
    }
  }

  // Rate fit over the successful runs.
  std::vector<RateSample> samples;
  for (const EpsRunRow& r : result.rows) {
    if (r.ok && r.residual_norm > 0) samples.push_back({r.eps, r.residual_norm});
  }
  try {
    result.rate = fit_rate(samples, plan.drop_plateau);
  } catch (const std::exception& e) {
    result.rate_error = e.what();
  }

  {
    std::vector<double> res, gaps;
    for (const EpsRunRow& r : result.rows) {
      if (!r.ok) continue;
      res.push_back(r.residual_norm);
      if (r.vs_limit) gaps.push_back(r.vs_limit->n_l2);
    }
    result.residual_monotone = res.size() == n_eps && strictly_decreasing(res);
    result.limit_gap_monotone = !gaps.empty() && gaps.size() == n_eps && strictly_decreasing(gaps);
  }

  if (plan.duality) {
    result.duality = check_duality_condition(plan.run.prm, plan.duality->c_mr,
                                             plan.duality->q0_prime);
  }

  if (limit_out && plan.run.grid.dim == 1) {
    try {
      result.limit_weak_residual = weak_residual(limit_out->traj, plan.run.prm, 8);
    } catch (const std::exception&) {
      // trajectory too coarse for the hat basis; not an error for a sweep
    }
  }

  bool pass = true;
  for (const EpsRunRow& r : result.rows) pass = pass && r.ok;
  if (plan.compare_limit && !limit_out) pass = false;
  if (plan.thresholds.min_slope) {
    pass = pass && result.rate && result.rate->slope >= *plan.thresholds.min_slope;
  }
  if (plan.thresholds.require_monotone_residual) pass = pass && result.residual_monotone;
  if (plan.compare_limit && plan.thresholds.require_monotone_limit_gap) {
    pass = pass && result.limit_gap_monotone;
  }
  result.thresholds_pass = pass;

  // ---- artifacts ----
  {
    std::ostringstream csv;
    csv << "eps,status,residual_norm,n_l2_diff,p_l2_diff,ph_phi_l2_diff,min_field,"
           "max_N,m_estimate,mass_ineq_violations,min_dissipation_beta0,"
           "dissipation_sign_cells_max,energy_excess,message\n";
    for (const EpsRunRow& r : result.rows) {
      csv << fmt17(r.eps) << "," << (r.ok ? "ok" : "failed") << ","
          << fmt17(r.residual_norm) << ","
          << (r.vs_limit ? fmt17(r.vs_limit->n_l2) : "") << ","
          << (r.vs_limit ? fmt17(r.vs_limit->p_l2) : "") << ","
          << (r.vs_limit ? fmt17(r.vs_limit->ph_phi_l2) : "") << ","
          << fmt17(r.min_field) << "," << fmt17(r.max_N) << "," << fmt17(r.m_estimate)
          << "," << r.mass_ineq_violations << "," << fmt17(r.min_dissipation_beta0)
          << "," << r.dissipation_sign_cells_max << "," << fmt17(r.energy_excess) << ","
          << r.message << "\n";
    }
    atomic_write_file(out_dir + "/sweep_summary.csv", csv.str());
  }

  if (result.rate) {
    const RateReport& rep = *result.rate;
    std::ostringstream samples_csv;
    samples_csv << "eps,residual,used_in_fit\n";
    for (std::size_t i = 0; i < rep.samples.size(); ++i) {
      samples_csv << fmt17(rep.samples[i].eps) << "," << fmt17(rep.samples[i].residual)
                  << "," << bool_text(rep.used[i]) << "\n";
    }
    atomic_write_file(out_dir + "/rate_samples.csv", samples_csv.str());

    std::ostringstream fit_csv;
    fit_csv << "slope,intercept,r_squared,plateau_detected,points_used\n";
    fit_csv << fmt17(rep.slope) << "," << fmt17(rep.intercept) << ","
            << fmt17(rep.r_squared) << "," << bool_text(rep.plateau_detected) << ","
            << rep.fit_count << "\n";
    atomic_write_file(out_dir + "/rate_fit.csv", fit_csv.str());

    atomic_write_file(out_dir + "/rates.svg", emit_rate_plot_svg(rep));
  }

  {
    std::ostringstream rep;
    rep << "key,value\n";
    rep << "branch," << (plan.run.prm.xi > 0 ? "xi_positive" : "xi_zero") << "\n";
    rep << "residual_norm_exponent," << (plan.run.prm.xi > 0 ? "2" : "4/3") << "\n";
    if (result.rate) {
      rep << "slope," << fmt17(result.rate->slope) << "\n";
      rep << "r_squared," << fmt17(result.rate->r_squared) << "\n";
      rep << "plateau_detected," << bool_text(result.rate->plateau_detected) << "\n";
    } else {
      rep << "rate_fit_error," << result.rate_error << "\n";
    }
    rep << "residual_monotone," << bool_text(result.residual_monotone) << "\n";
    if (plan.compare_limit) {
      rep << "limit_gap_monotone," << bool_text(result.limit_gap_monotone) << "\n";
      if (!limit_failure.empty()) rep << "limit_run_error," << limit_failure << "\n";
      rep << "limit_min_field," << fmt17(result.limit_min_field) << "\n";
      rep << "limit_mass_ineq_violations," << result.limit_mass_ineq_violations << "\n";
    }
    if (result.limit_weak_residual) {
      rep << "limit_weak_residual_N," << fmt17(result.limit_weak_residual->n_eq) << "\n";
      rep << "limit_weak_residual_P," << fmt17(result.limit_weak_residual->p_eq) << "\n";
    }
    if (result.duality) {
      rep << "duality_checked,true\n";
      rep << "duality_satisfied," << bool_text(result.duality->satisfied) << "\n";
      rep << "duality_ratio," << fmt17(result.duality->ratio) << "\n";
      rep << "duality_margin," << fmt17(result.duality->margin) << "\n";
      rep << "duality_q0," << fmt17(result.duality->q0) << "\n";
    } else {
      rep << "duality_checked,false\n";
    }
    rep << "thresholds_pass," << bool_text(result.thresholds_pass) << "\n";
    atomic_write_file(out_dir + "/report.csv", rep.str());
  }

  return result;
}

FastTrajectory run_fast_command(const RunConfig& cfg, const std::string& out_dir) {
  RunConfig run_cfg = cfg;
  if (run_cfg.diag.snapshot_stride == 0) run_cfg.diag.snapshot_stride = 1;
  const InitialFields init = build_initial_fields(run_cfg.init, run_cfg.grid, run_cfg.prm);
  FastRunOutput out = run_one_fast(run_cfg, init, run_cfg.prm.eps, 0.0, out_dir);
  return std::move(out.traj);
}

LimitTrajectory run_limit_command(const RunConfig& cfg, const std::string& out_dir) {
  RunConfig run_cfg = cfg;
  if (run_cfg.diag.snapshot_stride == 0) run_cfg.diag.snapshot_stride = 1;
  const InitialFields init = build_initial_fields(run_cfg.init, run_cfg.grid, run_cfg.prm);
  LimitRunOutput out = run_one_limit(run_cfg, init, out_dir);
  return std::move(out.traj);
}

} // namespace fastlim
