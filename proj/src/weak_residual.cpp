#include "fastlim/weak_residual.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fastlim {

namespace {

// Trapezoid of level values over the emitted times in [lo, hi] (indices).
double trapz(const std::vector<double>& t, const std::vector<double>& v,
             std::size_t lo, std::size_t hi) {
  double s = 0;
  for (std::size_t m = lo; m < hi; ++m) {
    s += 0.5 * (t[m + 1] - t[m]) * (v[m] + v[m + 1]);
  }
  return s;
}

double trapz_weighted(const std::vector<double>& t, const std::vector<double>& v,
                      const std::vector<double>& w, std::size_t lo, std::size_t hi) {
  double s = 0;
  for (std::size_t m = lo; m < hi; ++m) {
    s += 0.5 * (t[m + 1] - t[m]) * (v[m] * w[m] + v[m + 1] * w[m + 1]);
  }
  return s;
}

} // namespace

WeakResidualReport weak_residual(const LimitTrajectory& traj, const Parameters& prm,
                                 int n_modes, int time_bins) {
  const Grid& g = traj.grid;
  if (g.dim != 1) throw std::invalid_argument("weak_residual: 1-D trajectories only");
  if (n_modes < 1) throw std::invalid_argument("weak_residual: n_modes must be >= 1");
  if (time_bins < 1) throw std::invalid_argument("weak_residual: time_bins must be >= 1");
  const std::size_t levels = traj.states.size();
  if (levels < static_cast<std::size_t>(2 * time_bins + 1)) {
    throw std::invalid_argument("weak_residual: trajectory too coarse in time for the hat basis");
  }

  const std::size_t M = levels - 1;
  const std::size_t n = g.size();
  const double h = g.hx();
  const double L = g.Lx;

  std::vector<double> times(levels);
  for (std::size_t m = 0; m < levels; ++m) times[m] = traj.states[m].t;
  const double T = times[M] - times[0];
  if (!(T > 0)) throw std::invalid_argument("weak_residual: trajectory spans no time");

  // Bin boundaries snapped to emitted levels so hat kinks sit on samples.
  std::vector<std::size_t> bnd(time_bins + 1);
  for (int j = 0; j <= time_bins; ++j) {
    bnd[j] = static_cast<std::size_t>(std::llround(static_cast<double>(j) * M / time_bins));
  }
  for (int j = 0; j < time_bins; ++j) {
    if (bnd[j + 1] <= bnd[j]) throw std::invalid_argument("weak_residual: trajectory too coarse in time for the hat basis");
  }

  const int K = n_modes;
  // Per-mode spatial pairings at every level (midpoint rule in space).
  std::vector<std::vector<double>> AN(K + 1), AP(K + 1), APhi(K + 1), ARN(K + 1), ARP(K + 1);
  std::vector<double> psi_sq(K + 1, 0.0); // spatial L2^2 of cos(k pi x / L)
  std::vector<double> mode(n);
  for (int k = 0; k <= K; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      mode[i] = std::cos(k * std::numbers::pi * g.x_center(static_cast<int>(i)) / L);
      psi_sq[k] += mode[i] * mode[i] * h;
    }
    AN[k].resize(levels);
    AP[k].resize(levels);
    APhi[k].resize(levels);
    ARN[k].resize(levels);
    ARP[k].resize(levels);
    for (std::size_t m = 0; m < levels; ++m) {
      const LimitState& st = traj.states[m];
      double an = 0, ap = 0, aphi = 0, arn = 0, arp = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const Rates2 r = reaction_limit(st.N[i], st.P[i], prm);
        const double w = phi(st.N[i], st.P[i], prm);
        an += st.N[i] * mode[i];
        ap += st.P[i] * mode[i];
        aphi += w * mode[i];
        arn += r.dN * mode[i];
        arp += r.dP * mode[i];
      }
      AN[k][m] = an * h;
      AP[k][m] = ap * h;
      APhi[k][m] = aphi * h;
      ARN[k][m] = arn * h;
      ARP[k][m] = arp * h;
    }
  }

  WeakResidualReport rep;
  rep.modes = n_modes;
  rep.time_bins = time_bins;

  auto consider = [&](double res_n, double res_p, bool is_k0_const) {
    rep.n_eq = std::max(rep.n_eq, res_n);
    rep.p_eq = std::max(rep.p_eq, res_p);
    if (is_k0_const) {
      rep.n_mass_balance = res_n;
      rep.p_mass_balance = res_p;
    }
  };

  const double cross = prm.d3 - prm.d2;
  for (int k = 0; k <= K; ++k) {
    const double lam = std::pow(k * std::numbers::pi / L, 2.0);

    // theta = 1 over the full span.
    {
      const double lhs_n = (AN[k][M] - AN[k][0]) + prm.d1 * lam * trapz(times, AN[k], 0, M);
      const double rhs_n = trapz(times, ARN[k], 0, M);
      const double lhs_p = (AP[k][M] - AP[k][0]) + prm.d2 * lam * trapz(times, AP[k], 0, M);
      const double rhs_p = -cross * lam * trapz(times, APhi[k], 0, M) + trapz(times, ARP[k], 0, M);
      const double norm = std::sqrt(psi_sq[k] * T);
      consider(std::abs(lhs_n - rhs_n) / norm, std::abs(lhs_p - rhs_p) / norm, k == 0);
    }

    // Interior hat functions; time-by-parts puts d/dt onto the hat.
    std::vector<double> theta(levels);
    for (int j = 1; j < time_bins; ++j) {
      const std::size_t b0 = bnd[j - 1], b1 = bnd[j], b2 = bnd[j + 1];
      const double w1 = times[b1] - times[b0];
      const double w2 = times[b2] - times[b1];
      std::fill(theta.begin(), theta.end(), 0.0);
      for (std::size_t m = b0; m <= b2; ++m) {
        theta[m] = (m <= b1) ? (times[m] - times[b0]) / w1 : (times[b2] - times[m]) / w2;
      }
      auto ddt_term = [&](const std::vector<double>& A) {
        return -(trapz(times, A, b0, b1) / w1 - trapz(times, A, b1, b2) / w2);
      };
      const double lhs_n = ddt_term(AN[k]) + prm.d1 * lam * trapz_weighted(times, AN[k], theta, b0, b2);
      const double rhs_n = trapz_weighted(times, ARN[k], theta, b0, b2);
      const double lhs_p = ddt_term(AP[k]) + prm.d2 * lam * trapz_weighted(times, AP[k], theta, b0, b2);
      const double rhs_p = -cross * lam * trapz_weighted(times, APhi[k], theta, b0, b2) +
                           trapz_weighted(times, ARP[k], theta, b0, b2);
      const double norm = std::sqrt(psi_sq[k] * (w1 + w2) / 3.0);
      consider(std::abs(lhs_n - rhs_n) / norm, std::abs(lhs_p - rhs_p) / norm, false);
    }
  }
  return rep;
}

} // namespace fastlim
