#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fastlim/expr.hpp"
#include "fastlim/fast_solver.hpp"
#include "fastlim/limit_solver.hpp"
#include "fastlim/solver.hpp"

namespace fastlim {

struct InitialData {
  Expr N;                  // required
  Expr P;                  // total predators; split on the manifold
  Expr ps, ph;             // alternative: explicit split
  bool on_manifold = true; // true when ps/ph come from phi(N,P)
  double noise_amp = 0;    // additive uniform [-amp, amp] perturbation
  std::uint64_t seed = 0;
};

enum class EnergyBetaMode { schedule_by_branch, zero, fixed };

struct DiagnosticsCfg {
  bool energy = true;
  std::optional<double> energy_p; // default: 2 for xi>0, 1.1 for xi=0
  EnergyBetaMode beta_mode = EnergyBetaMode::schedule_by_branch;
  double beta_value = 0; // used with EnergyBetaMode::fixed
  int snapshot_stride = 0; // 0 = pick ~10 snapshots per run
};

struct RunConfig {
  Parameters prm;
  Grid grid;
  SolverConfig solver;
  double cross_slope_bound = 1.0;
  InitialData init;
  DiagnosticsCfg diag;
  std::vector<std::string> warnings; // soft validation notes
};

struct DualityInput {
  double c_mr = 0;
  double q0_prime = 0;
};

struct AcceptanceThresholds {
  std::optional<double> min_slope;
  bool require_monotone_residual = true;
  bool require_monotone_limit_gap = true;
};

struct ExperimentPlan {
  RunConfig run;
  std::vector<double> eps_list; // strictly decreasing, >= 3 entries
  bool compare_limit = true;
  bool drop_plateau = true;
  double norm_t0 = 0; // exclude t < t0 from space-time norms
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int jobs = 1;
  bool allow_off_manifold = false;
  std::optional<DualityInput> duality;
  AcceptanceThresholds thresholds;

  void validate() const;
};

RunConfig parse_run_config(const std::string& text);
ExperimentPlan parse_plan(const std::string& text);
std::string read_text_file(const std::string& path);

// Evaluates the initial-data expressions on the grid (plus the seeded noise)
// and splits predators on the slow manifold unless an explicit split was
// given. eps is irrelevant to the produced fields but the returned
// FastState/LimitState pair always satisfies ps+ph = P cellwise.
struct InitialFields {
  Field N, ps, ph, P;
};
InitialFields build_initial_fields(const InitialData& init, const Grid& g,
                                   const Parameters& prm);

FastState initial_fast_state(const InitialFields& f);
LimitState initial_limit_state(const InitialFields& f);

// Effective energy exponent / beta for a run, following the branch defaults.
double effective_energy_p(const DiagnosticsCfg& d, const Parameters& prm);
double effective_energy_beta(const DiagnosticsCfg& d, const Parameters& prm, double p);

} // namespace fastlim
