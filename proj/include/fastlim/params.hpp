#pragma once

#include <string>
#include <vector>

namespace fastlim {

// Model constants for the three-field predator-prey system and its
// cross-diffusion limits. Experiment values live in plan files, not here.
struct Parameters {
  double d1 = 1.0;    // prey diffusivity (length^2/time)
  double d2 = 1.0;    // searching-predator diffusivity
  double d3 = 0.5;    // handling-predator diffusivity
  double r0 = 1.0;    // prey growth rate (1/time)
  double eta = 1.0;   // inverse carrying capacity (1/density)
  double alpha = 1.0; // attack rate (1/(density*time))
  double xi = 0.0;    // predator competition coefficient (1/density), >= 0
  double gamma = 1.0; // handling-to-searching return rate (1/time)
  double Gamma = 1.0; // predator birth rate (1/time)
  double mu = 1.0;    // predator mortality (1/time)
  double eps = 1.0;   // time-scale separation of the switching dynamics
  double p_energy = 2.0; // energy exponent, > 1

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  // Soft checks (currently: d3 < d2 is expected but not required).
  std::vector<std::string> warnings() const;
};

// One grid cell's worth of unknowns for the three-field system.
struct PointState {
  double N = 0;  // prey density
  double ps = 0; // searching predators
  double ph = 0; // handling predators
};

// Round-off guard shared by all state-accepting entry points: values in
// [-1e-14, 0) are flushed to zero, anything more negative is a hard error.
double clamp_nonneg(double v, const char* what);

} // namespace fastlim
