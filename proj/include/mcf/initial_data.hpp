#pragma once

#include <optional>
#include <vector>

#include <boost/math/interpolators/cubic_hermite.hpp>

#include "mcf/patches.hpp"

namespace mcf {

struct FlowParams {
  double gamma = 0.75;
  double c = 1.0;
  double tau0 = 4.0;
  double R1 = 0.0;
  double beta = 0.0;  // bowl translation speed
  double r1 = 0.0;    // radius where the bowl core meets the analytic tail
  double r0 = 0.0;    // radius of the enveloping cylinder
  double T = 0.0;     // vanishing time of the enveloping cylinder
};

/// Fills the derived fields. R1 defaults to exp(gamma tau0 / 2).
/// Throws UnsupportedCase for gamma <= 1/2 and ConfigError for c <= 0.
FlowParams derive_params(double gamma, double c, double tau0, std::optional<double> R1 = {});

/// Tabulated bowl profile z(r), z_r(r) on [0, r1] at uniform spacing dr_ode,
/// with cubic Hermite interpolation between table nodes.
class BowlProfile {
 public:
  BowlProfile(std::vector<double> z, std::vector<double> slope, double dr_ode);

  double dr_ode() const noexcept { return dr_; }
  double r_end() const noexcept { return dr_ * static_cast<double>(z_.size() - 1); }
  const std::vector<double>& z_of_r() const noexcept { return z_; }
  const std::vector<double>& slope_of_r() const noexcept { return slope_; }

  /// Interpolated height; r must lie in [0, r_end].
  double z(double r) const;
  double slope(double r) const;

 private:
  std::vector<double> z_;
  std::vector<double> slope_;
  double dr_;
  boost::math::interpolators::cardinal_cubic_hermite<std::vector<double>> interp_;
};

/// Integrates z_rr = (1 + z_r^2)(beta - z_r / r) from the tip outwards to r1.
/// The actual step is r1 / ceil(r1 / dr_ode) so the table ends exactly at r1.
/// Throws IntegrationError if dr_ode > r1 / 100 or the slope fails to increase.
BowlProfile integrate_bowl(const FlowParams& params, double dr_ode);

/// Asymptotic tail height for r1 <= r < r0, continuous with the core at r1.
double tail_z(double r, const FlowParams& params, double z_r1);

/// dz/dr of the tail.
double tail_slope(double r, const FlowParams& params);

/// Inverse of tail_z, for z >= z_r1.
double tail_r(double z, const FlowParams& params, double z_r1);

struct BuildOptions {
  double side_over_r1 = 10.0;            // L = side_over_r1 * r1
  double corner_cap_fraction = 0.98;     // construction radius capped at this * r0
  double zmin_circle_fraction = 0.35;    // z_min where the tail radius is this * L/2
  double zmax_radius_fraction = 0.95;    // z_max where the tail radius is this * r0
  std::optional<double> z_max;           // explicit z_max, overrides the fraction
  double dr_ode = 0.0;                   // 0 selects r1 / 2048
};

struct InitialSurface {
  FlowParams params;
  BowlProfile bowl;
  double z_r1 = 0.0;
  CartesianPatch cart;
  CylindricalPatch cyl;
};

/// Unperturbed surface on both patches at t = 0. Beyond the corner cap the
/// height continues linearly along each ray.
InitialSurface build_patches(const FlowParams& params, int nx, int ny, int nz, int ntheta,
                             const BuildOptions& options = {});

/// Height of the unperturbed surface of revolution at radius r (bowl core,
/// tail, then linear continuation past the corner cap).
double profile_z(const InitialSurface& surface, double r, double corner_cap_fraction = 0.98);

struct NearPerturbation {
  double a0 = 0.0;
  double a1 = 0.0;
  double r_m = 0.0;
};

struct FarPerturbation {
  double a0 = 0.0;
  double z_a = 0.0;
  double z_b = 0.0;
  int n = 2;
};

/// z -> z + a0 (1 + a1 x y)(r^2 - r_m^2) for r < r_m.
void apply_near(CartesianPatch& cart, const NearPerturbation& p);

/// r -> r (1 - a0 F^2) for z in (z_a, z_b), with
/// F = (1 + cos(n theta) / 4) sin(pi (z - z_b) / (z_a - z_b)).
/// Rejects odd n, a0 outside (0, 1) and intervals outside the patch.
void apply_far(CylindricalPatch& cyl, const FarPerturbation& p);

/// Multiplier 1 - a0 F^2 of the far perturbation at (z, theta).
double far_factor(const FarPerturbation& p, double z, double theta);

}  // namespace mcf
