#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fastlim/fast_solver.hpp"
#include "fastlim/grid.hpp"
#include "fastlim/params.hpp"

namespace fastlim {

// Modified-energy readings at one time level.
struct EnergyReport {
  double t = 0;
  double H = 0;           // energy value
  double beta = 0;        // shift used
  double p = 2;           // exponent
  double dissipation = 0; // value of the energy-dissipation quadratic form
};

// H = int (N+beta)^(p-1) * (int_0^ps (alpha r/(xi r+1))^(p-1) dr) dx
//   + (1/p) int gamma^(p-1) ph^p dx.
// The inner integral is closed-form for xi = 0 and adaptive Gauss-Kronrod
// (1e-12 relative) for xi > 0.
EnergyReport energy(const FastState& st, const Grid& g, const Parameters& prm,
                    double beta, double p);

// int (a-b) * (a_beta^(p-1) - b^(p-1)) dx with a = alpha ps N/(xi ps+1),
// a_beta = alpha ps (N+beta)/(xi ps+1), b = gamma ph. Pointwise nonnegative
// when beta = 0. sign_cells, when given, receives the number of cells whose
// integrand is negative (possible only for beta > 0).
double dissipation(const FastState& st, const Grid& g, const Parameters& prm,
                   double beta, double p, int* sign_cells = nullptr);

// beta(eps) = eps^(1/(4-p)) for p in (1, 2].
double beta_schedule(double eps, double p);

// Space-time L^p norm over the trajectory's time span: midpoint in space,
// trapezoid in time. extract(state, cell) -> sample value.
template <class State, class Extract>
double lp_norm_spacetime(const std::vector<State>& states, const Grid& g,
                         Extract&& extract, double p) {
  if (states.size() < 2) throw std::invalid_argument("lp_norm_spacetime: need at least 2 time levels");
  if (!(p >= 1)) throw std::invalid_argument("lp_norm_spacetime: exponent must be >= 1");
  const double vol = g.cell_volume();
  std::vector<double> level(states.size());
  std::vector<double> cell(g.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      cell[i] = std::pow(std::abs(extract(states[k], i)), p);
    }
    level[k] = neumaier_sum(cell) * vol;
  }
  double integral = 0;
  for (std::size_t k = 0; k + 1 < states.size(); ++k) {
    const double dt = states[k + 1].t - states[k].t;
    integral += 0.5 * dt * (level[k] + level[k + 1]);
  }
  return std::pow(integral, 1.0 / p);
}

// Extremum/mass snapshot of one state; pure measurement.
struct ExtremaReport {
  double t = 0;
  std::vector<std::pair<std::string, double>> mins;  // per field
  std::vector<std::pair<std::string, double>> maxs;  // per field
  std::vector<std::pair<std::string, double>> masses;
  double m_estimate = 0; // min over grid of N
};

ExtremaReport extremum_and_mass_monitor(const FastState& st, const Grid& g);

struct LimitState; // defined in limit_solver.hpp
ExtremaReport extremum_and_mass_monitor(const LimitState& st, const Grid& g);

// Adaptive Gauss(7)/Kronrod(15) quadrature to a relative tolerance.
double integrate_adaptive_gk(const std::function<double(double)>& f, double a,
                             double b, double rel_tol);

} // namespace fastlim
