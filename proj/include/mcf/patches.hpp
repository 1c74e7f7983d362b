#pragma once

#include <numbers>

#include "mcf/grid2d.hpp"

namespace mcf {

/// Tip-region representation: the surface as a height z(x, y) over a square
/// of side L centred on the axis. z(i, k) sits at (x(i), y(k)).
struct CartesianPatch {
  double L = 0.0;
  int nx = 0;
  int ny = 0;
  Grid2D z;
  double t = 0.0;

  CartesianPatch() = default;
  CartesianPatch(double side, int nx, int ny, double time = 0.0);

  double dx() const noexcept { return L / (nx - 1); }
  double dy() const noexcept { return L / (ny - 1); }
  double half_side() const noexcept { return 0.5 * L; }

  // Node coordinates are computed symmetrically about the origin so that
  // x(nx-1-i) == -x(i) exactly.
  double x(int i) const noexcept { return (i - 0.5 * (nx - 1)) * dx(); }
  double y(int k) const noexcept { return (k - 0.5 * (ny - 1)) * dy(); }

  bool on_perimeter(int i, int k) const noexcept {
    return i == 0 || k == 0 || i == nx - 1 || k == ny - 1;
  }
};

/// Far-region representation: the surface as a radius r(z, theta) on
/// [z_min, z_max] x [0, 2*pi), periodic in theta.
struct CylindricalPatch {
  double z_min = 0.0;
  double z_max = 0.0;
  int nz = 0;
  int ntheta = 0;
  Grid2D r;
  double t = 0.0;

  CylindricalPatch() = default;
  CylindricalPatch(double z_lo, double z_hi, int nz, int ntheta, double time = 0.0);

  double dz() const noexcept { return (z_max - z_min) / (nz - 1); }
  double dtheta() const noexcept { return 2.0 * std::numbers::pi / ntheta; }
  double z(int i) const noexcept { return i == nz - 1 ? z_max : z_min + i * dz(); }
  double theta(int k) const noexcept { return k * dtheta(); }

  /// Angle of column k folded into (-pi, pi]. Columns k and ntheta-k get
  /// exactly opposite angles, which keeps theta -> -theta symmetry bitwise.
  double theta_signed(int k) const noexcept {
    return (2 * k <= ntheta ? k : k - ntheta) * dtheta();
  }

  int wrap(int k) const noexcept {
    const int m = k % ntheta;
    return m < 0 ? m + ntheta : m;
  }
};

}  // namespace mcf
