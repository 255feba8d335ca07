#include "fastlim/fast_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fastlim/diagnostics.hpp"

namespace fastlim {

namespace {

void clamp_field(Field& f, const char* name) {
  for (double& v : f) v = clamp_nonneg(v, name);
}

void validate_state(const FastState& st, const Grid& g) {
  if (st.N.size() != g.size() || st.ps.size() != g.size() || st.ph.size() != g.size()) {
    throw std::invalid_argument("fast state: field/grid shape mismatch");
  }
}

// Explicit Euler on the non-stiff reactions (everything except the 1/eps
// exchange). Kept first-order deliberately: the update is multiplicative in
// each density under the dt validity bound, so nonnegativity and the prey
// maximum principle survive without a nonlinear solve.
void slow_reaction_apply(FastState& st, const Parameters& prm, double dt) {
  const std::size_t n = st.N.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double N = st.N[i], ps = st.ps[i], ph = st.ph[i];
    const double pred = prm.alpha * ps * N / (prm.xi * ps + 1.0);
    st.N[i] = N + dt * (prm.r0 * (1.0 - prm.eta * N) * N - pred);
    st.ps[i] = ps + dt * (-prm.mu * ps + prm.Gamma * ph);
    st.ph[i] = ph + dt * (-prm.mu * ph);
  }
  clamp_field(st.N, "N");
  clamp_field(st.ps, "ps");
  clamp_field(st.ph, "ph");
}

void diffuse_all(FastState& st, const Grid& g, const Parameters& prm,
                 const SolverConfig& cfg, double dt) {
  st.N = diffusion_step(g, st.N, prm.d1, dt, cfg.diffusion);
  st.ps = diffusion_step(g, st.ps, prm.d2, dt, cfg.diffusion);
  st.ph = diffusion_step(g, st.ph, prm.d3, dt, cfg.diffusion);
  clamp_field(st.N, "N");
  clamp_field(st.ps, "ps");
  clamp_field(st.ph, "ph");
}

} // namespace

double fast_reaction_pointwise_solve(double s_total, double N, double ph_old,
                                     double dt_over_eps, const Parameters& prm) {
  s_total = clamp_nonneg(s_total, "s_total");
  N = clamp_nonneg(N, "N");
  ph_old = clamp_nonneg(ph_old, "ph_old");
  if (!(dt_over_eps >= 0) || !std::isfinite(dt_over_eps)) {
    throw std::invalid_argument("fast solve: dt_over_eps must be finite and >= 0");
  }
  if (ph_old > s_total * (1.0 + 1e-12) + 1e-14) {
    throw std::invalid_argument("fast solve: ph_old exceeds s_total");
  }
  ph_old = std::min(ph_old, s_total);
  if (s_total == 0.0 || dt_over_eps == 0.0) return ph_old;

  const double k = dt_over_eps;
  const double a = prm.alpha, g = prm.gamma, xi = prm.xi;
  auto residual = [&](double ph) {
    const double ps = s_total - ph;
    return ph - ph_old - k * (a * ps * N / (xi * ps + 1.0) - g * ph);
  };

  // residual(0) <= 0 and residual(s_total) >= 0, and d(residual)/d(ph) =
  // 1 + k*(gamma + alpha N/(xi ps+1)^2) > 0, so the root is unique in the
  // bracket.
  double lo = 0.0, hi = s_total;
  double ph = std::clamp(ph_old, lo, hi);
  const double tol = 1e-12 * (1.0 + s_total);
  for (int it = 0; it < 200; ++it) {
    const double r = residual(ph);
    if (r > 0)
      hi = ph;
    else
      lo = ph;
    const double ps = s_total - ph;
    const double q = xi * ps + 1.0;
    const double dr = 1.0 + k * (g + a * N / (q * q));
    double step = -r / dr;
    double next = ph + step;
    if (!std::isfinite(next) || next <= lo || next >= hi) {
      next = 0.5 * (lo + hi);
      step = next - ph;
    }
    ph = next;
    if (std::abs(step) <= tol || hi - lo <= 1e-16 * (1.0 + s_total)) {
      return std::clamp(ph, 0.0, s_total);
    }
  }
  throw std::runtime_error("fast solve: bracketed iteration failed to converge (internal error)");
}

void fast_exchange_apply(FastState& st, const Parameters& prm, double dt_over_eps) {
  const std::size_t n = st.N.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double s = st.ps[i] + st.ph[i];
    const double ph_new = fast_reaction_pointwise_solve(s, st.N[i], st.ph[i], dt_over_eps, prm);
    st.ph[i] = ph_new;
    st.ps[i] = s - ph_new;
  }
}

FastState step_fast(const FastState& st, const Grid& g, const SolverConfig& cfg,
                    const Parameters& prm) {
  validate_state(st, g);
  FastState out = st;
  const double dt = cfg.dt;

  if (cfg.splitting == Splitting::strang) {
    fast_exchange_apply(out, prm, 0.5 * dt / prm.eps);
    diffuse_all(out, g, prm, cfg, 0.5 * dt);
    slow_reaction_apply(out, prm, dt);
    diffuse_all(out, g, prm, cfg, 0.5 * dt);
    fast_exchange_apply(out, prm, 0.5 * dt / prm.eps);
  } else {
    slow_reaction_apply(out, prm, dt);
    diffuse_all(out, g, prm, cfg, dt);
    fast_exchange_apply(out, prm, dt / prm.eps);
  }

  out.t = st.t + dt;
  check_blowup(out.N, "N", out.t);
  check_blowup(out.ps, "ps", out.t);
  check_blowup(out.ph, "ph", out.t);
  return out;
}

double slow_reaction_dt_limit(const Parameters& prm, double max_N_initial) {
  const double max_N = std::max(max_N_initial, 1.0 / prm.eta);
  const double rate = std::max({prm.r0, prm.mu, prm.Gamma, prm.alpha * max_N});
  return 0.1 / rate;
}

namespace {

FastStepDiag measure_fast(const FastState& st, const Grid& g, const Parameters& prm,
                          const EnergyOptions& eo) {
  FastStepDiag d;
  d.t = st.t;
  d.mass_N = field_mass(g, st.N);
  d.mass_ps = field_mass(g, st.ps);
  d.mass_ph = field_mass(g, st.ph);
  d.min_N = field_min(st.N);
  d.max_N = field_max(st.N);
  d.min_ps = field_min(st.ps);
  d.max_ps = field_max(st.ps);
  d.min_ph = field_min(st.ph);
  d.max_ph = field_max(st.ph);

  const double vol = g.cell_volume();
  double sq = 0, p43 = 0, l1 = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = prm.alpha * st.ps[i] * st.N[i] / (prm.xi * st.ps[i] + 1.0) -
                     prm.gamma * st.ph[i];
    sq += r * r;
    p43 += std::pow(std::abs(r), 4.0 / 3.0);
    l1 += std::abs(r);
  }
  d.residual_sq_int = sq * vol;
  d.residual_p43_int = p43 * vol;
  d.residual_abs_int = l1 * vol;

  if (eo.enabled) {
    const EnergyReport er = energy(st, g, prm, eo.beta, eo.p);
    d.energy = er.H;
    d.beta = eo.beta;
    d.dissipation = er.dissipation;
    if (eo.beta == 0.0) {
      d.dissipation_beta0 = er.dissipation;
    } else {
      int cells = 0;
      d.dissipation_beta0 = dissipation(st, g, prm, 0.0, eo.p, nullptr);
      dissipation(st, g, prm, eo.beta, eo.p, &cells);
      d.dissipation_sign_cells = cells;
    }
  }
  return d;
}

} // namespace

FastTrajectory integrate_fast(const FastState& init, const Grid& g,
                              const SolverConfig& cfg, const Parameters& prm,
                              const FastHooks& hooks) {
  prm.validate();
  g.validate();
  cfg.validate();
  validate_state(init, g);

  SolverConfig run_cfg = cfg;
  const long long n_steps = std::max(1LL, std::llround(cfg.t_end / cfg.dt));
  run_cfg.dt = cfg.t_end / static_cast<double>(n_steps);

  FastState state = init;
  state.t = init.t;
  clamp_field(state.N, "N");
  clamp_field(state.ps, "ps");
  clamp_field(state.ph, "ph");

  const double dt_limit = slow_reaction_dt_limit(prm, field_max(state.N));
  if (run_cfg.dt > dt_limit) {
    throw std::invalid_argument("integrate_fast: dt = " + std::to_string(run_cfg.dt) +
                                " exceeds the explicit slow-reaction bound " +
                                std::to_string(dt_limit));
  }
  if (run_cfg.diffusion == DiffusionScheme::explicit_euler) {
    const double d_max = std::max({prm.d1, prm.d2, prm.d3});
    // step_fast diffuses over dt/2 under Strang splitting, but the whole-dt
    // Lie bound is required so either splitting is safe.
    if (run_cfg.dt > diffusion_cfl_limit(g, d_max) * (1.0 + 1e-12)) {
      throw std::invalid_argument("integrate_fast: explicit diffusion violates the CFL bound");
    }
  }

  FastTrajectory traj;
  traj.grid = g;

  auto emit = [&](const FastState& s) {
    if (hooks.keep_states) traj.states.push_back(s);
    if (hooks.on_emit) hooks.on_emit(s);
  };

  FastStepDiag prev_diag = measure_fast(state, g, prm, hooks.energy);
  if (hooks.on_diag) hooks.on_diag(prev_diag);
  emit(state);

  try {
    for (long long step = 1; step <= n_steps; ++step) {
      const Field N_old = state.N;
      state = step_fast(state, g, run_cfg, prm);
      state.t = init.t + static_cast<double>(step) * run_cfg.dt;

      FastStepDiag diag = measure_fast(state, g, prm, hooks.energy);
      const double dt = run_cfg.dt;
      const double m_old = prev_diag.mass_ps + prev_diag.mass_ph;
      const double m_new = diag.mass_ps + diag.mass_ph;
      const double m_avg = 0.5 * (m_old + m_new);
      const double phm_avg = 0.5 * (prev_diag.mass_ph + diag.mass_ph);
      diag.mass_ineq_defect = (m_new - m_old) / dt - (prm.Gamma * phm_avg - prm.mu * m_avg);
      // Total predator mass only changes in the slow substep, which sees the
      // mid-phase ph mass: off-centering is O(dt*rates^2*mass) plus whatever
      // the fast exchange redistributed, itself bounded through the
      // backward-Euler identity |delta ph| = (dt/eps)|residual|.
      const double rsum = prm.mu + prm.Gamma;
      diag.mass_ineq_tol = 1e-14 * std::max(1.0, m_avg) / dt +
                           dt * rsum * rsum * (m_avg + phm_avg) +
                           0.5 * rsum * (dt / prm.eps) *
                               (prev_diag.residual_abs_int + diag.residual_abs_int) +
                           1e-13;
      double abs_int = 0, signed_int = 0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double dN = (state.N[i] - N_old[i]) / dt;
        abs_int += std::abs(dN);
        signed_int += dN;
      }
      diag.dNdt_abs_int = abs_int * g.cell_volume();
      diag.dNdt_int = signed_int * g.cell_volume();

      if (hooks.on_diag) hooks.on_diag(diag);
      if (step % run_cfg.output_stride == 0 || step == n_steps) emit(state);
      prev_diag = diag;
    }
  } catch (...) {
    if (hooks.on_abort) hooks.on_abort(traj);
    throw;
  }
  return traj;
}

} // namespace fastlim
