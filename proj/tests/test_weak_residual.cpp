#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fastlim/weak_residual.hpp"
#include "fastlim/grid.hpp"

using namespace fastlim;

namespace {

Parameters desk_params(double xi) {
  Parameters p;
  p.d1 = 0.05;
  p.d2 = 0.1;
  p.d3 = 0.03;
  p.r0 = 2.0;
  p.eta = 1.0;
  p.alpha = 3.0;
  p.xi = xi;
  p.gamma = 1.0;
  p.Gamma = 1.5;
  p.mu = 0.4;
  p.eps = 1e-3;
  return p;
}

LimitState cosine_state(const Grid& g) {
  LimitState st;
  st.N = make_field(g);
  st.P = make_field(g);
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.x_center(i);
    st.N[i] = 0.5 + 0.3 * std::cos(std::numbers::pi * x / g.Lx);
    st.P[i] = 0.4 + 0.2 * std::cos(2.0 * std::numbers::pi * x / g.Lx);
  }
  return st;
}

LimitTrajectory solve(const Parameters& p, int cells, double dt, double T, int stride) {
  const Grid g = Grid::line(cells, 1.0);
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.t_end = T;
  cfg.output_stride = stride;
  return integrate_limit(cosine_state(g), g, cfg, p);
}

} // namespace

TEST_CASE("identically zero solution has zero residual") {
  const Grid g = Grid::line(16, 1.0);
  LimitTrajectory traj;
  traj.grid = g;
  for (int m = 0; m <= 40; ++m) {
    LimitState st;
    st.t = m * 0.025;
    st.N = make_field(g);
    st.P = make_field(g);
    traj.states.push_back(st);
  }
  const WeakResidualReport rep = weak_residual(traj, desk_params(1.0), 4, 8);
  CHECK(rep.n_eq == 0.0);
  CHECK(rep.p_eq == 0.0);
}

TEST_CASE("validation: dimensionality, modes, and time resolution") {
  const Parameters p = desk_params(1.0);
  LimitTrajectory traj = solve(p, 16, 1e-3, 0.02, 1);
  CHECK_THROWS_AS(weak_residual(traj, p, 0, 4), std::invalid_argument);
  // 21 levels cannot support 16 bins with two levels each
  CHECK_THROWS_AS(weak_residual(traj, p, 4, 16), std::invalid_argument);

  LimitTrajectory traj2d;
  traj2d.grid = Grid::rect(8, 8, 1.0, 1.0);
  CHECK_THROWS_AS(weak_residual(traj2d, p, 4, 4), std::invalid_argument);
}

TEST_CASE("k=0 constant-in-time residual is the mass-balance defect") {
  const Parameters p = desk_params(1.0);
  const LimitTrajectory traj = solve(p, 64, 2e-4, 0.2, 5);
  const WeakResidualReport rep = weak_residual(traj, p, 4, 8);

  // Direct mass balance over the emitted levels: P(T)-P(0) mass against the
  // trapezoid of the reaction integral (cross term integrates to zero).
  const Grid& g = traj.grid;
  std::vector<double> times, prod_n, prod_p;
  for (const LimitState& st : traj.states) {
    times.push_back(st.t);
    double rn = 0, rp = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Rates2 r = reaction_limit(st.N[i], st.P[i], p);
      rn += r.dN;
      rp += r.dP;
    }
    prod_n.push_back(rn * g.hx());
    prod_p.push_back(rp * g.hx());
  }
  auto trapz = [&](const std::vector<double>& v) {
    double s = 0;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      s += 0.5 * (times[k + 1] - times[k]) * (v[k] + v[k + 1]);
    }
    return s;
  };
  const double T = times.back() - times.front();
  const double defect_n =
      std::abs(field_mass(g, traj.states.back().N) - field_mass(g, traj.states.front().N) -
               trapz(prod_n)) / std::sqrt(g.Lx * T);
  const double defect_p =
      std::abs(field_mass(g, traj.states.back().P) - field_mass(g, traj.states.front().P) -
               trapz(prod_p)) / std::sqrt(g.Lx * T);

  CHECK(rep.n_mass_balance == doctest::Approx(defect_n).epsilon(1e-10));
  CHECK(rep.p_mass_balance == doctest::Approx(defect_p).epsilon(1e-10));
  // quadrature-tolerance scale, not O(1)
  CHECK(rep.n_mass_balance < 1e-4);
  CHECK(rep.p_mass_balance < 1e-4);
}

TEST_CASE("residual shrinks under (h, dt) -> (h/2, dt/2)") {
  const Parameters p = desk_params(1.0);
  const LimitTrajectory coarse = solve(p, 32, 4e-4, 0.25, 2);
  const LimitTrajectory fine = solve(p, 64, 2e-4, 0.25, 4);
  const WeakResidualReport rc = weak_residual(coarse, p, 6, 8);
  const WeakResidualReport rf = weak_residual(fine, p, 6, 8);
  CHECK(rf.n_eq < rc.n_eq);
  CHECK(rf.p_eq < rc.p_eq);
}
