#pragma once

#include <functional>
#include <vector>

#include "fastlim/kinetics.hpp"
#include "fastlim/solver.hpp"

namespace fastlim {

struct LimitState {
  double t = 0;
  Field N, P;
};

struct LimitStepDiag {
  double t = 0;
  double mass_N = 0, mass_P = 0;
  double min_N = 0, max_N = 0, min_P = 0, max_P = 0;
  double phi_mass = 0;         // integral of phi(N,P), the manifold value
  double mass_ineq_defect = 0; // predator-mass balance defect (0 on initial row)
  double mass_ineq_tol = 0;
};

struct LimitTrajectory {
  Grid grid;
  std::vector<LimitState> states;
};

struct LimitHooks {
  std::function<void(const LimitStepDiag&)> on_diag;
  std::function<void(const LimitState&)> on_emit;
  std::function<void(const LimitTrajectory&)> on_abort;
  bool keep_states = true;
};

// One step of the limiting (N,P) system: explicit reactions, explicit cross
// term computed as the discrete Neumann Laplacian of the pointwise manifold
// value phi(N,P), then implicit diffusion (d1 for N, d2 for P). The cross
// term is skipped entirely when d2 == d3 so that case assembles the plain
// reaction-diffusion pair bit-for-bit.
LimitState step_limit(const LimitState& st, const Grid& g, const SolverConfig& cfg,
                      const Parameters& prm, double cross_slope_bound = 1.0);

LimitTrajectory integrate_limit(const LimitState& init, const Grid& g,
                                const SolverConfig& cfg, const Parameters& prm,
                                const LimitHooks& hooks = {},
                                double cross_slope_bound = 1.0);

// Stability bound for the explicit cross term: dt <= h^2/(2 dim |d3-d2| L)
// with L a bound on d(phi)/dP (phi is 1-Lipschitz in P, so 1 by default).
double cross_term_dt_limit(const Grid& g, const Parameters& prm,
                           double cross_slope_bound = 1.0);

} // namespace fastlim
