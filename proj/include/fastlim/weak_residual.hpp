#pragma once

#include "fastlim/limit_solver.hpp"

namespace fastlim {

struct WeakResidualReport {
  double n_eq = 0; // max over test functions, N equation
  double p_eq = 0; // max over test functions, P equation
  // Residuals of the spatially-constant, time-constant test function, i.e.
  // the integrated mass-balance defect of each equation.
  double n_mass_balance = 0;
  double p_mass_balance = 0;
  int modes = 0;
  int time_bins = 0;
};

// Tests the trajectory against the weak form of the limiting system with
// Neumann-compatible test functions psi(x,t) = cos(k pi x / L) * theta(t),
// k = 0..n_modes, where theta ranges over a constant plus a hat basis on
// time_bins uniform bins. Spatial gradient pairings are moved onto
// Delta psi = -(k pi/L)^2 psi exactly (valid for this family), the cross
// term likewise. Each |LHS - RHS| is normalized by the L2(Q_T) norm of psi.
// 1-D trajectories only; needs at least two emitted levels per time bin.
WeakResidualReport weak_residual(const LimitTrajectory& traj, const Parameters& prm,
                                 int n_modes, int time_bins = 16);

} // namespace fastlim
