#pragma once

#include "fastlim/params.hpp"

namespace fastlim {

struct Rates3 {
  double dN = 0;
  double dps = 0;
  double dph = 0;
};

struct Rates2 {
  double dN = 0;
  double dP = 0;
};

// Full reaction right-hand side of the three-field system, including the
// 1/eps switching terms. The two switching contributions are exact negatives
// of each other (same double, opposite sign).
Rates3 reaction_fast(const PointState& s, const Parameters& prm);

// alpha*ps*N/(xi*ps+1) - gamma*ph. Positive when predation flux exceeds the
// handling-to-searching return flux; zero exactly on the slow manifold.
double slow_manifold_residual(const PointState& s, const Parameters& prm);

// Handling-predator density on the slow manifold for total predator density
// P. xi=0 uses the closed form alpha*N*P/(alpha*N+gamma); xi>0 selects the
// small root of the manifold quadratic with a cancellation-safe branch.
// Result is clamped into [0, min(P, alpha*N/(gamma*xi))].
double phi(double N, double P, const Parameters& prm);

// gamma*xi*ph^2 - (alpha*N + gamma + gamma*xi*P)*ph + alpha*N*P.
// Only defined for xi > 0 (the quadratic degenerates at xi = 0).
double quadratic_residual(double ph, double N, double P, const Parameters& prm);

// Reaction part of the limiting (N,P) system; the cross-diffusion term is
// the limit solver's job, not this function's.
Rates2 reaction_limit(double N, double P, const Parameters& prm);

struct DualityCheck {
  bool satisfied = false;
  double ratio = 0;  // (d2-d3)/(d2+d3)
  double bound = 0;  // 1/c_mr
  double margin = 0; // bound - ratio
  double q0 = 0;     // conjugate exponent q0'/(q0'-1)
};

// Checks the quasi-uniform-diffusion condition (d2-d3)/(d2+d3) < 1/c_mr.
// c_mr is the user-supplied maximal-regularity constant for exponent q0'
// (it is not computable here); q0' must lie in (1, 5/4).
DualityCheck check_duality_condition(const Parameters& prm, double c_mr,
                                     double q0_prime);

} // namespace fastlim
