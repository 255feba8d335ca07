#include "fastlim/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace fastlim {

void SolverConfig::validate() const {
  if (!(dt > 0) || !std::isfinite(dt)) throw std::invalid_argument("solver.dt: must be finite and > 0");
  if (!(t_end >= dt)) throw std::invalid_argument("solver.t_end: must be >= dt");
  if (output_stride < 1) throw std::invalid_argument("solver.output_stride: must be >= 1");
}

void check_blowup(std::span<const double> f, const char* name, double t) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = f[i];
    if (!std::isfinite(v) || std::abs(v) > kBlowupGuard) {
      throw std::runtime_error(std::string("blow-up guard: field ") + name +
                               " at cell " + std::to_string(i) + ", t = " +
                               std::to_string(t) + ", value = " + std::to_string(v));
    }
  }
}

std::string splitting_name(Splitting s) {
  return s == Splitting::strang ? "strang" : "lie";
}

Splitting splitting_from_name(const std::string& s) {
  if (s == "strang") return Splitting::strang;
  if (s == "lie") return Splitting::lie;
  throw std::invalid_argument("solver.splitting: expected 'strang' or 'lie', got '" + s + "'");
}

std::string diffusion_name(DiffusionScheme s) {
  return s == DiffusionScheme::implicit ? "implicit" : "explicit";
}

DiffusionScheme diffusion_from_name(const std::string& s) {
  if (s == "implicit") return DiffusionScheme::implicit;
  if (s == "explicit") return DiffusionScheme::explicit_euler;
  throw std::invalid_argument("solver.diffusion: expected 'implicit' or 'explicit', got '" + s + "'");
}

} // namespace fastlim
