#pragma once

#include <utility>

#include "mcf/patches.hpp"

namespace mcf {

/// Thresholds that make "each boundary lies inside the other patch" concrete.
/// The z_min circle must sit at radii in [margin, 1 - margin] * L/2 and every
/// perimeter node must map at least `perimeter_gap_cells` axial cells above z_min.
struct OverlapState {
  double margin_fraction = 0.25;
  double perimeter_gap_cells = 4.0;
  double last_mismatch = 0.0;
};

/// Bilinear interpolation of z. (x, y) must be at least one cell inside the square.
double sample_cartesian(const CartesianPatch& patch, double x, double y);

/// Bilinear interpolation of r, periodic in theta. z must lie in [z_min + dz, z_max - dz].
double sample_cylindrical(const CylindricalPatch& patch, double z, double theta);

/// Radius s along the ray (s cos theta, s sin theta) where the Cartesian surface
/// reaches height z_target. Throws OverlapViolation when no bracket exists and
/// GeometryError when samples are not monotone around the root.
double radial_root(const CartesianPatch& patch, double theta, double z_target);

/// Height z at which the cylindrical surface reaches radius r_target along
/// angle theta (first crossing from z_min upwards). Throws GeometryError if r
/// decreases in z before the crossing, OverlapViolation if there is none.
double axial_root(const CylindricalPatch& patch, double theta, double r_target);

struct ExchangeReport {
  double circle_min_radius = 0.0;  // extent of the z_min circle in the square
  double circle_max_radius = 0.0;
  double perimeter_min_z = 0.0;    // lowest height the square perimeter maps to
  double perimeter_max_z = 0.0;
};

/// Sets the z_min row of `cyl` from the Cartesian interior and the perimeter of
/// `cart` from the cylindrical interior. Nothing is written unless every
/// boundary value is obtained and the overlap thresholds hold; otherwise
/// OverlapViolation is thrown.
ExchangeReport exchange_boundaries(CartesianPatch& cart, CylindricalPatch& cyl,
                                   const OverlapState& overlap = {});

/// Largest |z_cart - z_cyl| over probe points spread through the annulus both
/// patches cover. Returns +infinity when a probe cannot be inverted.
double measure_overlap_mismatch(const CartesianPatch& cart, const CylindricalPatch& cyl,
                                int n_samples);

/// Rebuilds both patches on new domains (same node counts, same time), filling
/// every node from the old pair: modified Akima (Cartesian) or cubic-in-z
/// (cylindrical) interpolation inside the old patch of the same kind, root
/// finding in the other patch elsewhere. Throws
/// ConfigError when a new node cannot be reached from either old patch.
std::pair<CartesianPatch, CylindricalPatch> regrid(const CartesianPatch& cart,
                                                   const CylindricalPatch& cyl, double new_L,
                                                   double new_z_min);

struct RegridPolicy {
  double shrink_factor = 0.9;
  double circle_target_fraction = 0.5;  // new z_min puts the circle at this fraction of L/2
  double low_circle_fraction = 0.3;     // used instead when the perimeter sits too close to z_min
  int max_attempts = 40;
};

/// Mean height of the Cartesian surface on the circle of the given radius.
double circle_level(const CartesianPatch& cart, double radius, int n_angles = 64);

/// Exchanges boundaries, regridding as often as needed until the overlap
/// thresholds hold. Returns the number of regrids performed. Throws
/// ConfigError if the overlap cannot be restored.
int exchange_or_regrid(CartesianPatch& cart, CylindricalPatch& cyl, const OverlapState& overlap,
                       const RegridPolicy& policy, ExchangeReport* report = nullptr);

}  // namespace mcf
