#pragma once

#include "mcf/grid2d.hpp"
#include "mcf/patches.hpp"
#include "mcf/stencils.hpp"

// Forward-Euler interior updates. Each kernel comes as a serial reference and
// an OpenMP version; both evaluate identical per-node arithmetic, so their
// outputs agree bitwise for any thread count.
namespace mcf::kernels {

/// Graph-MCF rate for z(x, y) from its derivatives.
inline double cartesian_rate(const CartDerivs& d) noexcept {
  const double zx2 = d.z_x * d.z_x;
  const double zy2 = d.z_y * d.z_y;
  return ((1.0 + zy2) * d.z_xx + (1.0 + zx2) * d.z_yy - 2.0 * d.z_x * d.z_y * d.z_xy) /
         (1.0 + zx2 + zy2);
}

/// MCF rate for r(z, theta) from its derivatives and the local radius.
inline double cylindrical_rate(const CylDerivs& d, double r) noexcept {
  const double rz2 = d.r_z * d.r_z;
  const double rt2 = d.r_theta * d.r_theta;
  const double num = (1.0 + rz2) * d.r_thetatheta + (r * r + rt2) * d.r_zz -
                     2.0 * d.r_theta * d.r_z * d.r_ztheta - rt2 / r;
  const double den = rt2 + r * r * (1.0 + rz2);
  return num / den - 1.0 / r;
}

// `out` must have the shape of the input grid; only interior entries are written.
void advance_cartesian_serial(const CartesianPatch& in, double dt, Grid2D& out);
void advance_cartesian_parallel(const CartesianPatch& in, double dt, Grid2D& out);

// Rows 1..nz-2, every column; rows 0 and nz-1 of `out` are left alone.
void advance_cylindrical_serial(const CylindricalPatch& in, double dt, Grid2D& out);
void advance_cylindrical_parallel(const CylindricalPatch& in, double dt, Grid2D& out);

double min_value_serial(const Grid2D& g);
double min_value_parallel(const Grid2D& g);

/// Flat index of the first non-finite entry, or -1.
long first_non_finite(const Grid2D& g);

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int thread_count();

}  // namespace mcf::kernels
