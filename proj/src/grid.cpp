#include "fastlim/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fastlim {

Grid Grid::line(int cells, double extent) {
  Grid g;
  g.dim = 1;
  g.nx = cells;
  g.ny = 1;
  g.Lx = extent;
  g.Ly = 0;
  g.validate();
  return g;
}

Grid Grid::rect(int cells_x, int cells_y, double extent_x, double extent_y) {
  Grid g;
  g.dim = 2;
  g.nx = cells_x;
  g.ny = cells_y;
  g.Lx = extent_x;
  g.Ly = extent_y;
  g.validate();
  return g;
}

bool Grid::same_as(const Grid& o) const {
  return dim == o.dim && nx == o.nx && ny == o.ny && Lx == o.Lx && Ly == o.Ly;
}

void Grid::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid.dim: must be 1 or 2");
  if (nx < 4) throw std::invalid_argument("grid.cells_x: need at least 4 cells");
  if (!(Lx > 0)) throw std::invalid_argument("grid.extent_x: must be > 0");
  if (dim == 2) {
    if (ny < 4) throw std::invalid_argument("grid.cells_y: need at least 4 cells");
    if (!(Ly > 0)) throw std::invalid_argument("grid.extent_y: must be > 0");
  }
}

Field make_field(const Grid& g, double value) { return Field(g.size(), value); }

double neumaier_sum(std::span<const double> v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double field_min(std::span<const double> v) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v) m = std::min(m, x);
  return m;
}

double field_max(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  return m;
}

double field_mass(const Grid& g, std::span<const double> v) {
  return neumaier_sum(v) * g.cell_volume();
}

Field neumann_laplacian(const Grid& g, const Field& f) {
  if (f.size() != g.size()) throw std::invalid_argument("laplacian: field/grid shape mismatch");
  Field out(f.size(), 0.0);
  const double ihx2 = 1.0 / (g.hx() * g.hx());
  if (g.dim == 1) {
    const int n = g.nx;
    for (int i = 0; i < n; ++i) {
      const double left = (i > 0) ? f[i - 1] : f[0];
      const double right = (i < n - 1) ? f[i + 1] : f[n - 1];
      out[i] = (left - 2.0 * f[i] + right) * ihx2;
    }
    return out;
  }
  const double ihy2 = 1.0 / (g.hy() * g.hy());
  const int nx = g.nx, ny = g.ny;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t k = static_cast<std::size_t>(iy) * nx + ix;
      const double l = (ix > 0) ? f[k - 1] : f[k];
      const double r = (ix < nx - 1) ? f[k + 1] : f[k];
      const double dn = (iy > 0) ? f[k - nx] : f[k];
      const double up = (iy < ny - 1) ? f[k + nx] : f[k];
      out[k] = (l - 2.0 * f[k] + r) * ihx2 + (dn - 2.0 * f[k] + up) * ihy2;
    }
  }
  return out;
}

double diffusion_cfl_limit(const Grid& g, double d) {
  if (d <= 0) return std::numeric_limits<double>::infinity();
  double s = 1.0 / (g.hx() * g.hx());
  if (g.dim == 2) s += 1.0 / (g.hy() * g.hy());
  return 1.0 / (2.0 * d * s);
}

namespace {

// Thomas elimination for (I - a*T) u = rhs along one line, where T is the
// mirror-ghost Neumann second-difference stencil: diag 1+a at the ends,
// 1+2a inside, off-diagonals -a. Strictly diagonally dominant for a >= 0.
void solve_neumann_line(std::span<double> u, double a, std::vector<double>& cp) {
  const std::size_t n = u.size();
  cp.resize(n);
  double denom = 1.0 + a;
  cp[0] = -a / denom;
  u[0] = u[0] / denom;
  for (std::size_t i = 1; i < n; ++i) {
    const double b = (i == n - 1) ? 1.0 + a : 1.0 + 2.0 * a;
    denom = b + a * cp[i - 1];
    cp[i] = -a / denom;
    u[i] = (u[i] + a * u[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    u[i] -= cp[i] * u[i + 1];
  }
}

void restore_mean(Field& u, double target_sum) {
  // Two correction sweeps bring the compensated sum to within an ulp of the
  // pre-solve value, so repeated steps do not drift mass.
  for (int pass = 0; pass < 2; ++pass) {
    const double defect = target_sum - neumaier_sum(u);
    if (defect == 0.0) return;
    const double per_cell = defect / static_cast<double>(u.size());
    for (double& x : u) x += per_cell;
  }
}

} // namespace

Field diffusion_step(const Grid& g, const Field& f, double d, double dt,
                     DiffusionScheme scheme) {
  if (f.size() != g.size()) throw std::invalid_argument("diffusion_step: field/grid shape mismatch");
  if (!(dt >= 0) || !std::isfinite(dt)) throw std::invalid_argument("diffusion_step: dt must be finite and >= 0");
  if (!(d >= 0) || !std::isfinite(d)) throw std::invalid_argument("diffusion_step: diffusivity must be finite and >= 0");
  for (double x : f) {
    if (!std::isfinite(x)) throw std::runtime_error("diffusion_step: non-finite input field");
  }
  if (d == 0.0 || dt == 0.0) return f;

  if (scheme == DiffusionScheme::explicit_euler) {
    const double limit = diffusion_cfl_limit(g, d);
    if (dt > limit * (1.0 + 1e-12)) {
      throw std::runtime_error("diffusion_step: explicit step violates CFL bound dt <= " +
                               std::to_string(limit));
    }
    Field lap = neumann_laplacian(g, f);
    Field out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] + dt * d * lap[i];
    return out;
  }

  const double target = neumaier_sum(f);
  // Solve in fluctuation form: the stencil annihilates constants, so shifting
  // by f[0] is algebraically exact and keeps constant fields bitwise fixed.
  const double shift = f[0];
  Field u(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) u[i] = f[i] - shift;
  std::vector<double> cp;
  const double ax = d * dt / (g.hx() * g.hx());
  if (g.dim == 1) {
    solve_neumann_line(std::span<double>(u), ax, cp);
  } else {
    const int nx = g.nx, ny = g.ny;
    for (int iy = 0; iy < ny; ++iy) {
      solve_neumann_line(std::span<double>(u).subspan(static_cast<std::size_t>(iy) * nx, nx), ax, cp);
    }
    const double ay = d * dt / (g.hy() * g.hy());
    std::vector<double> col(ny);
    for (int ix = 0; ix < nx; ++ix) {
      for (int iy = 0; iy < ny; ++iy) col[iy] = u[static_cast<std::size_t>(iy) * nx + ix];
      solve_neumann_line(std::span<double>(col), ay, cp);
      for (int iy = 0; iy < ny; ++iy) u[static_cast<std::size_t>(iy) * nx + ix] = col[iy];
    }
  }
  for (double& v : u) v += shift;
  restore_mean(u, target);
  return u;
}

} // namespace fastlim
