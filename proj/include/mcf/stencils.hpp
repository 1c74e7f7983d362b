#pragma once

#include "mcf/patches.hpp"

namespace mcf {

/// Centred second-order derivatives of r(z, theta) at one node.
struct CylDerivs {
  double r_z = 0.0;
  double r_theta = 0.0;
  double r_zz = 0.0;
  double r_thetatheta = 0.0;
  double r_ztheta = 0.0;
};

/// Centred second-order derivatives of z(x, y) at one node.
struct CartDerivs {
  double z_x = 0.0;
  double z_y = 0.0;
  double z_xx = 0.0;
  double z_yy = 0.0;
  double z_xy = 0.0;
};

namespace detail {

// Unchecked cores. `lo`, `mid`, `hi` point at rows i-1, i, i+1; km/kp are the
// neighbouring column indices (already wrapped for the periodic direction).
// Every caller, serial or parallel, goes through these so results agree bitwise.

inline CylDerivs cyl_derivs_rows(const double* lo, const double* mid, const double* hi, int k,
                                 int km, int kp, double dz, double dth) noexcept {
  CylDerivs d;
  d.r_z = (hi[k] - lo[k]) / (2.0 * dz);
  d.r_theta = (mid[kp] - mid[km]) / (2.0 * dth);
  d.r_zz = (hi[k] + lo[k] - 2.0 * mid[k]) / (dz * dz);
  d.r_thetatheta = (mid[kp] + mid[km] - 2.0 * mid[k]) / (dth * dth);
  d.r_ztheta = ((hi[kp] + lo[km]) - (hi[km] + lo[kp])) / (4.0 * dz * dth);
  return d;
}

inline CartDerivs cart_derivs_rows(const double* lo, const double* mid, const double* hi, int k,
                                   double dx, double dy) noexcept {
  CartDerivs d;
  d.z_x = (hi[k] - lo[k]) / (2.0 * dx);
  d.z_y = (mid[k + 1] - mid[k - 1]) / (2.0 * dy);
  d.z_xx = (hi[k] + lo[k] - 2.0 * mid[k]) / (dx * dx);
  d.z_yy = (mid[k + 1] + mid[k - 1] - 2.0 * mid[k]) / (dy * dy);
  d.z_xy = ((hi[k + 1] + lo[k - 1]) - (hi[k - 1] + lo[k + 1])) / (4.0 * dx * dy);
  return d;
}

}  // namespace detail

/// Derivatives at axial row i (1 <= i <= nz-2) and any column k (wrapped).
/// Throws IndexError on boundary rows.
CylDerivs cyl_derivs(const CylindricalPatch& patch, int i, int k);

/// Derivatives at an interior node. Throws IndexError on the perimeter.
CartDerivs cart_derivs(const CartesianPatch& patch, int i, int k);

}  // namespace mcf
