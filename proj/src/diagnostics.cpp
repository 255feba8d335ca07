#include "fastlim/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "fastlim/limit_solver.hpp"

namespace fastlim {

namespace {

// QK15 nodes/weights on [-1,1] (Kronrod extension of 7-point Gauss).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkResult {
  double kronrod;
  double err;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double resk = kWgk[7] * f(c);
  double resg = kWg[3] * f(c);
  for (int i = 0; i < 7; ++i) {
    const double x = h * kXgk[i];
    const double fsum = f(c - x) + f(c + x);
    resk += kWgk[i] * fsum;
    if (i % 2 == 1) resg += kWg[i / 2] * fsum;
  }
  return {resk * h, std::abs((resk - resg) * h)};
}

double gk_adaptive(const std::function<double(double)>& f, double a, double b,
                   double tol_abs, int depth) {
  const GkResult r = gk15(f, a, b);
  if (r.err <= tol_abs || depth >= 48 || b - a < 1e-300) return r.kronrod;
  const double c = 0.5 * (a + b);
  return gk_adaptive(f, a, c, 0.5 * tol_abs, depth + 1) +
         gk_adaptive(f, c, b, 0.5 * tol_abs, depth + 1);
}

} // namespace

double integrate_adaptive_gk(const std::function<double(double)>& f, double a,
                             double b, double rel_tol) {
  if (a == b) return 0.0;
  const GkResult first = gk15(f, a, b);
  const double scale = std::max(std::abs(first.kronrod), 1e-300);
  return gk_adaptive(f, a, b, rel_tol * scale, 0);
}

double beta_schedule(double eps, double p) {
  if (!(eps > 0)) throw std::invalid_argument("beta_schedule: eps must be > 0");
  if (!(p > 1.0) || !(p <= 2.0)) throw std::invalid_argument("beta_schedule: p must lie in (1, 2]");
  return std::pow(eps, 1.0 / (4.0 - p));
}

namespace {

// int_0^s (alpha r/(xi r+1))^(p-1) dr.
double switching_primitive(double s, double p, const Parameters& prm) {
  if (s <= 0) return 0.0;
  if (prm.xi == 0.0) {
    return std::pow(prm.alpha, p - 1.0) * std::pow(s, p) / p;
  }
  auto f = [&](double r) {
    return std::pow(prm.alpha * r / (prm.xi * r + 1.0), p - 1.0);
  };
  return integrate_adaptive_gk(f, 0.0, s, 1e-12);
}

} // namespace

EnergyReport energy(const FastState& st, const Grid& g, const Parameters& prm,
                    double beta, double p) {
  if (!(p > 1)) throw std::invalid_argument("energy: exponent p must be > 1");
  if (!(beta >= 0)) throw std::invalid_argument("energy: beta must be >= 0");
  if (st.N.size() != g.size()) throw std::invalid_argument("energy: field/grid shape mismatch");

  const double vol = g.cell_volume();
  const double gpow = std::pow(prm.gamma, p - 1.0);
  double h = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    h += std::pow(st.N[i] + beta, p - 1.0) * switching_primitive(st.ps[i], p, prm);
    h += gpow * std::pow(st.ph[i], p) / p;
  }

  EnergyReport out;
  out.t = st.t;
  out.H = h * vol;
  out.beta = beta;
  out.p = p;
  out.dissipation = dissipation(st, g, prm, beta, p, nullptr);
  return out;
}

double dissipation(const FastState& st, const Grid& g, const Parameters& prm,
                   double beta, double p, int* sign_cells) {
  if (!(p > 1)) throw std::invalid_argument("dissipation: exponent p must be > 1");
  if (!(beta >= 0)) throw std::invalid_argument("dissipation: beta must be >= 0");
  if (st.N.size() != g.size()) throw std::invalid_argument("dissipation: field/grid shape mismatch");

  int negatives = 0;
  double sum = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double denom = prm.xi * st.ps[i] + 1.0;
    const double a = prm.alpha * st.ps[i] * st.N[i] / denom;
    const double a_beta = prm.alpha * st.ps[i] * (st.N[i] + beta) / denom;
    const double b = prm.gamma * st.ph[i];
    const double term = (a - b) * (std::pow(a_beta, p - 1.0) - std::pow(b, p - 1.0));
    if (term < 0) ++negatives;
    sum += term;
  }
  if (sign_cells) *sign_cells = negatives;
  return sum * g.cell_volume();
}

ExtremaReport extremum_and_mass_monitor(const FastState& st, const Grid& g) {
  ExtremaReport r;
  r.t = st.t;
  r.mins = {{"N", field_min(st.N)}, {"ps", field_min(st.ps)}, {"ph", field_min(st.ph)}};
  r.maxs = {{"N", field_max(st.N)}, {"ps", field_max(st.ps)}, {"ph", field_max(st.ph)}};
  r.masses = {{"N", field_mass(g, st.N)},
              {"ps", field_mass(g, st.ps)},
              {"ph", field_mass(g, st.ph)},
              {"predators", field_mass(g, st.ps) + field_mass(g, st.ph)}};
  r.m_estimate = field_min(st.N);
  return r;
}

ExtremaReport extremum_and_mass_monitor(const LimitState& st, const Grid& g) {
  ExtremaReport r;
  r.t = st.t;
  r.mins = {{"N", field_min(st.N)}, {"P", field_min(st.P)}};
  r.maxs = {{"N", field_max(st.N)}, {"P", field_max(st.P)}};
  r.masses = {{"N", field_mass(g, st.N)}, {"P", field_mass(g, st.P)}};
  r.m_estimate = field_min(st.N);
  return r;
}

} // namespace fastlim
