#include "fastlim/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fastlim {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("parameters.") + name +
                                ": must be finite and > 0");
  }
}

} // namespace

void Parameters::validate() const {
  require_positive(d1, "d1");
  require_positive(d2, "d2");
  require_positive(d3, "d3");
  require_positive(r0, "r0");
  require_positive(eta, "eta");
  require_positive(alpha, "alpha");
  require_positive(gamma, "gamma");
  require_positive(Gamma, "Gamma");
  require_positive(mu, "mu");
  require_positive(eps, "eps");
  if (!(xi >= 0) || !std::isfinite(xi)) {
    throw std::invalid_argument("parameters.xi: must be finite and >= 0");
  }
  if (!(p_energy > 1) || !std::isfinite(p_energy)) {
    throw std::invalid_argument("parameters.p_energy: must be finite and > 1");
  }
}

std::vector<std::string> Parameters::warnings() const {
  std::vector<std::string> out;
  if (!(d3 < d2)) {
    out.push_back("parameters: expected d3 < d2 (handling predators move "
                  "less far than searching ones); got d3 >= d2");
  }
  return out;
}

double clamp_nonneg(double v, const char* what) {
  if (v >= 0) return v;
  if (v >= -1e-14) return 0.0;
  throw std::domain_error(std::string(what) + " is negative (" +
                          std::to_string(v) + ")");
}

} // namespace fastlim
