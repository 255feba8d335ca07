#pragma once

#include <functional>
#include <string>

#include "fastlim/grid.hpp"
#include "fastlim/params.hpp"

namespace fastlim {

enum class Splitting { strang, lie };

struct SolverConfig {
  double dt = 0;
  double t_end = 0;
  Splitting splitting = Splitting::strang;
  DiffusionScheme diffusion = DiffusionScheme::implicit;
  int output_stride = 1; // trajectory/emission stride in steps

  void validate() const; // dt > 0, t_end >= dt, stride >= 1
};

// Any field value beyond this trips the blow-up guard and aborts the run.
inline constexpr double kBlowupGuard = 1e12;

// Per-run energy instrumentation knobs. beta is the shift in the modified
// energy; p the exponent. Both default from the Parameters/branch in the
// callers that know the experiment context.
struct EnergyOptions {
  double p = 2.0;
  double beta = 0.0;
  bool enabled = false; // energy instrumentation is opt-in (it costs a quadrature per cell)
};

void check_blowup(std::span<const double> f, const char* name, double t);

std::string splitting_name(Splitting s);
Splitting splitting_from_name(const std::string& s);
std::string diffusion_name(DiffusionScheme s);
DiffusionScheme diffusion_from_name(const std::string& s);

} // namespace fastlim
