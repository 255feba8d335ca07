#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fastlim {

// Uniform cell-centered mesh, 1-D or 2-D tensor, with homogeneous Neumann
// boundaries realized by mirror ghost values. Cell (ix,iy) is centered at
// ((ix+1/2)hx, (iy+1/2)hy); 2-D fields are row-major (iy*nx + ix).
struct Grid {
  int dim = 1;
  int nx = 0;
  int ny = 1;
  double Lx = 0;
  double Ly = 0;

  static Grid line(int cells, double extent);
  static Grid rect(int cells_x, int cells_y, double extent_x, double extent_y);

  double hx() const { return Lx / nx; }
  double hy() const { return Ly / ny; }
  std::size_t size() const {
    return static_cast<std::size_t>(nx) * (dim == 2 ? ny : 1);
  }
  double cell_volume() const { return dim == 2 ? hx() * hy() : hx(); }
  double x_center(int ix) const { return (ix + 0.5) * hx(); }
  double y_center(int iy) const { return (iy + 0.5) * hy(); }

  bool same_as(const Grid& o) const;
  void validate() const; // >= 4 cells per axis, positive extents
};

using Field = std::vector<double>;

Field make_field(const Grid& g, double value = 0.0);

// Compensated (Neumaier) summation; used wherever mass bookkeeping matters.
double neumaier_sum(std::span<const double> v);

double field_min(std::span<const double> v);
double field_max(std::span<const double> v);
double field_mass(const Grid& g, std::span<const double> v);

// Second-order mirror-ghost Neumann Laplacian.
Field neumann_laplacian(const Grid& g, const Field& f);

enum class DiffusionScheme { implicit, explicit_euler };

// One time step of du/dt = d*Laplacian(u) with Neumann boundaries.
// implicit: backward Euler (tridiagonal elimination in 1-D, alternating
// direction sweeps in 2-D); unconditionally stable, keeps nonnegative data
// nonnegative, and preserves the spatial mean exactly (defect redistributed
// after the solve). explicit_euler: forward Euler, rejects steps above the
// CFL bound. d = 0 returns the input untouched.
Field diffusion_step(const Grid& g, const Field& f, double d, double dt,
                     DiffusionScheme scheme = DiffusionScheme::implicit);

// Largest explicit-Euler-stable dt for diffusivity d on this grid.
double diffusion_cfl_limit(const Grid& g, double d);

} // namespace fastlim
