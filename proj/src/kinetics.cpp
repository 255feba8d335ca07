#include "fastlim/kinetics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fastlim {

namespace {

double predation_flux(double N, double ps, const Parameters& prm) {
  return prm.alpha * ps * N / (prm.xi * ps + 1.0);
}

} // namespace

Rates3 reaction_fast(const PointState& s, const Parameters& prm) {
  prm.validate();
  const double N = clamp_nonneg(s.N, "N");
  const double ps = clamp_nonneg(s.ps, "ps");
  const double ph = clamp_nonneg(s.ph, "ph");

  const double pred = predation_flux(N, ps, prm);
  const double switching = prm.gamma * ph - pred; // gain of ps, loss of ph

  Rates3 r;
  r.dN = prm.r0 * (1.0 - prm.eta * N) * N - pred;
  r.dps = switching / prm.eps - prm.mu * ps + prm.Gamma * ph;
  r.dph = -switching / prm.eps - prm.mu * ph;
  return r;
}

double slow_manifold_residual(const PointState& s, const Parameters& prm) {
  const double N = clamp_nonneg(s.N, "N");
  const double ps = clamp_nonneg(s.ps, "ps");
  const double ph = clamp_nonneg(s.ph, "ph");
  return predation_flux(N, ps, prm) - prm.gamma * ph;
}

double phi(double N, double P, const Parameters& prm) {
  N = clamp_nonneg(N, "N");
  P = clamp_nonneg(P, "P");
  const double a = prm.alpha, g = prm.gamma, xi = prm.xi;

  if (xi == 0.0) {
    return a * N * P / (a * N + g);
  }

  const double A = a * N + g + g * xi * P;
  const double B = a * N + g - g * xi * P;
  const double root = std::sqrt(B * B + 4.0 * g * g * xi * P);
  // A - root cancels when P is small (A ~ root); the product-of-roots form
  // 2*a*N*P/(A + root) is exact there.
  double r = (B > 0.0) ? 2.0 * a * N * P / (A + root) : (A - root) / (2.0 * xi * g);

  r = std::max(r, 0.0);
  r = std::min(r, P);
  r = std::min(r, a * N / (g * xi));
  return r;
}

double quadratic_residual(double ph, double N, double P, const Parameters& prm) {
  if (prm.xi == 0.0) {
    throw std::domain_error(
        "quadratic_residual: xi = 0 degenerates the quadratic; use the xi=0 "
        "branch of phi instead");
  }
  N = clamp_nonneg(N, "N");
  P = clamp_nonneg(P, "P");
  const double a = prm.alpha, g = prm.gamma, xi = prm.xi;
  return g * xi * ph * ph - (a * N + g + g * xi * P) * ph + a * N * P;
}

Rates2 reaction_limit(double N, double P, const Parameters& prm) {
  prm.validate();
  N = clamp_nonneg(N, "N");
  P = clamp_nonneg(P, "P");
  const double w = phi(N, P, prm);
  Rates2 r;
  r.dN = prm.r0 * (1.0 - prm.eta * N) * N - prm.gamma * w;
  r.dP = prm.Gamma * w - prm.mu * P;
  return r;
}

DualityCheck check_duality_condition(const Parameters& prm, double c_mr,
                                     double q0_prime) {
  if (!(c_mr > 0) || !std::isfinite(c_mr)) {
    throw std::invalid_argument("duality check: c_mr must be finite and > 0");
  }
  if (!(q0_prime > 1.0) || !(q0_prime < 1.25)) {
    throw std::invalid_argument("duality check: q0' must lie in (1, 5/4)");
  }
  DualityCheck out;
  out.ratio = (prm.d2 - prm.d3) / (prm.d2 + prm.d3);
  out.bound = 1.0 / c_mr;
  out.margin = out.bound - out.ratio;
  out.satisfied = out.ratio < out.bound;
  out.q0 = q0_prime / (q0_prime - 1.0);
  return out;
}

} // namespace fastlim
