#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fastlim/config.hpp"
#include "fastlim/kinetics.hpp"
#include "fastlim/rate_fit.hpp"
#include "fastlim/weak_residual.hpp"

namespace fastlim {

struct LimitComparison {
  double n_l2 = 0;      // ||N_fast - N_limit||_{L2(Q_T)}
  double p_l2 = 0;      // ||(ps+ph) - P||_{L2(Q_T)}
  double ph_phi_l2 = 0; // ||ph - phi(N_limit, P_limit)||_{L2(Q_T)}
};

// Both trajectories must share the grid and emission times.
LimitComparison compare_to_limit(const FastTrajectory& fast,
                                 const LimitTrajectory& limit,
                                 const Parameters& prm);

struct EpsRunRow {
  double eps = 0;
  bool ok = false;
  std::string message;         // failure reason when !ok
  double residual_norm = 0;    // branch norm of the slow-manifold residual over Q_T
  std::optional<LimitComparison> vs_limit;
  double min_field = 0;        // min over all steps and fields
  double max_N = 0;            // max over all steps
  double m_estimate = 0;       // min over all steps of min_x N
  long mass_ineq_violations = 0;
  double min_dissipation_beta0 = 0;
  int dissipation_sign_cells_max = 0;
  double energy_excess = 0;    // max_t (H(t) - H(0))^+
};

struct SweepResult {
  std::vector<EpsRunRow> rows; // eps descending
  std::optional<RateReport> rate;
  std::string rate_error;
  bool residual_monotone = false;
  bool limit_gap_monotone = false;
  std::optional<DualityCheck> duality;
  // limit-run monitors
  double limit_min_field = 0;
  double limit_max_N = 0;
  long limit_mass_ineq_violations = 0;
  std::optional<WeakResidualReport> limit_weak_residual;
  bool thresholds_pass = false;
};

// Runs the whole experiment: one fast run per eps (jobs in parallel),
// optionally the limit run and comparisons, rate fitting, and all CSV/SVG
// artifacts under out_dir. Identical plan + seed produces byte-identical
// artifacts; failed eps runs are reported and excluded from the fit.
SweepResult run_sweep(const ExperimentPlan& plan, const std::string& out_dir,
                      int jobs);

// Single runs behind `fastlim run-fast` / `run-limit`: integrate, write
// diagnostics.csv and snapshots under out_dir, return the trajectory.
FastTrajectory run_fast_command(const RunConfig& cfg, const std::string& out_dir);
LimitTrajectory run_limit_command(const RunConfig& cfg, const std::string& out_dir);

} // namespace fastlim
