#include "mcf/initial_data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/numeric/odeint/stepper/runge_kutta4.hpp>

#include "mcf/errors.hpp"

namespace mcf {

FlowParams derive_params(double gamma, double c, double tau0, std::optional<double> R1) {
  if (!(gamma > 0.5))
    throw UnsupportedCase("gamma = " + std::to_string(gamma) +
                          ": the critical case gamma = 1/2 and below is not supported");
  if (!(c > 0.0)) throw ConfigError("c must be positive, got " + std::to_string(c));
  FlowParams p;
  p.gamma = gamma;
  p.c = c;
  p.tau0 = tau0;
  p.R1 = R1 ? *R1 : std::exp(0.5 * gamma * tau0);
  if (!(p.R1 > 0.0)) throw ConfigError("R1 must be positive");
  p.beta = (gamma - 0.5) * std::pow(2.0, -(gamma - 0.5)) * std::exp(-(gamma + 0.5) * tau0) / c;
  p.r1 = p.R1 * std::exp(-(gamma + 0.5) * tau0);
  p.r0 = std::numbers::sqrt2 * std::exp(-0.5 * tau0);
  p.T = std::exp(-tau0);
  if (!(p.r1 < p.r0))
    throw ConfigError("matching radius r1 = " + std::to_string(p.r1) +
                      " is not inside the enveloping cylinder r0 = " + std::to_string(p.r0));
  return p;
}

BowlProfile::BowlProfile(std::vector<double> z, std::vector<double> slope, double dr_ode)
    : z_(std::move(z)),
      slope_(std::move(slope)),
      dr_(dr_ode),
      interp_(std::vector<double>(z_), std::vector<double>(slope_), 0.0, dr_ode) {}

double BowlProfile::z(double r) const {
  if (!(r >= 0.0 && r <= r_end() * (1.0 + 1e-12)))
    throw DomainError("bowl profile queried at r = " + std::to_string(r) + " outside [0, " +
                      std::to_string(r_end()) + "]");
  return interp_(std::min(r, r_end()));
}

double BowlProfile::slope(double r) const {
  if (!(r >= 0.0 && r <= r_end() * (1.0 + 1e-12)))
    throw DomainError("bowl profile queried at r = " + std::to_string(r));
  return interp_.prime(std::min(r, r_end()));
}

BowlProfile integrate_bowl(const FlowParams& params, double dr_ode) {
  const double r1 = params.r1;
  const double beta = params.beta;
  if (!(dr_ode > 0.0 && dr_ode <= r1 / 100.0))
    throw IntegrationError("bowl step " + std::to_string(dr_ode) + " must lie in (0, r1/100]");
  const auto n = static_cast<std::size_t>(std::ceil(r1 / dr_ode - 1e-9));
  const double h = r1 / static_cast<double>(n);

  using State = std::array<double, 2>;  // (z, z_r)
  auto rhs = [beta](const State& s, State& ds, double r) {
    ds[0] = s[1];
    ds[1] = (1.0 + s[1] * s[1]) * (beta - s[1] / r);
  };

  std::vector<double> z(n + 1), slope(n + 1);
  z[0] = 0.0;
  slope[0] = 0.0;
  // Series start z = beta r^2/4 + beta^3 r^4/128 avoids the 0/0 at the axis.
  const double b3 = beta * beta * beta;
  State s{beta * h * h / 4.0 + b3 * std::pow(h, 4) / 128.0, beta * h / 2.0 + b3 * std::pow(h, 3) / 32.0};
  z[1] = s[0];
  slope[1] = s[1];
  boost::numeric::odeint::runge_kutta4<State> stepper;
  for (std::size_t j = 1; j < n; ++j) {
    stepper.do_step(rhs, s, h * static_cast<double>(j), h);
    z[j + 1] = s[0];
    slope[j + 1] = s[1];
    if (!(slope[j + 1] > slope[j]) || !std::isfinite(s[0]))
      throw IntegrationError("bowl slope stopped increasing at r = " +
                             std::to_string(h * static_cast<double>(j + 1)) +
                             "; reduce the integration step");
  }
  return BowlProfile(std::move(z), std::move(slope), h);
}

namespace {

double tail_base(const FlowParams& p, double r) { return p.r0 * p.r0 - r * r; }

}  // namespace

double tail_z(double r, const FlowParams& params, double z_r1) {
  if (!(r < params.r0))
    throw DomainError("tail_z: r = " + std::to_string(r) +
                      " at or beyond the enveloping cylinder r0 = " + std::to_string(params.r0));
  if (!(r >= params.r1 * (1.0 - 1e-14)))
    throw DomainError("tail_z: r = " + std::to_string(r) + " inside the core r1 = " +
                      std::to_string(params.r1));
  const double e = 0.5 - params.gamma;
  return z_r1 + (std::pow(tail_base(params, r), e) - std::pow(tail_base(params, params.r1), e)) /
                    params.c;
}

double tail_slope(double r, const FlowParams& params) {
  if (!(r < params.r0)) throw DomainError("tail_slope: r beyond the enveloping cylinder");
  return (2.0 * params.gamma - 1.0) * r * std::pow(tail_base(params, r), -0.5 - params.gamma) /
         params.c;
}

double tail_r(double z, const FlowParams& params, double z_r1) {
  if (!(z >= z_r1))
    throw DomainError("tail_r: z = " + std::to_string(z) + " below the tail start " +
                      std::to_string(z_r1));
  if (z == z_r1) return params.r1;
  const double e = 0.5 - params.gamma;
  const double K = std::pow(tail_base(params, params.r1), e) + params.c * (z - z_r1);
  return std::sqrt(params.r0 * params.r0 - std::pow(K, 1.0 / e));
}

double profile_z(const InitialSurface& s, double r, double corner_cap_fraction) {
  const FlowParams& p = s.params;
  if (r < p.r1) return s.bowl.z(r);
  const double r_cap = corner_cap_fraction * p.r0;
  if (r <= r_cap) return tail_z(r, p, s.z_r1);
  return tail_z(r_cap, p, s.z_r1) + tail_slope(r_cap, p) * (r - r_cap);
}

InitialSurface build_patches(const FlowParams& params, int nx, int ny, int nz, int ntheta,
                             const BuildOptions& options) {
  if (!(options.corner_cap_fraction > 0.0 && options.corner_cap_fraction < 1.0))
    throw ConfigError("corner cap fraction must lie in (0, 1)");
  if (!(options.zmax_radius_fraction > 0.0 && options.zmax_radius_fraction < 1.0))
    throw ConfigError("zmax_radius_fraction must lie in (0, 1)");
  const double dr_ode = options.dr_ode > 0.0 ? options.dr_ode : params.r1 / 2048.0;
  BowlProfile bowl = integrate_bowl(params, dr_ode);
  const double z_r1 = bowl.z_of_r().back();
  const double L = options.side_over_r1 * params.r1;

  const double r_circle = options.zmin_circle_fraction * 0.5 * L;
  if (!(r_circle > params.r1 && r_circle < options.zmax_radius_fraction * params.r0))
    throw ConfigError("z_min circle radius " + std::to_string(r_circle) +
                      " must lie in the tail, between r1 and the z_max radius");
  const double z_min = tail_z(r_circle, params, z_r1);
  const double z_max =
      options.z_max ? *options.z_max : tail_z(options.zmax_radius_fraction * params.r0, params, z_r1);
  if (!(z_max > z_min))
    throw ConfigError("z_max = " + std::to_string(z_max) + " does not exceed z_min = " +
                      std::to_string(z_min));

  InitialSurface s{params, std::move(bowl), z_r1, CartesianPatch(L, nx, ny),
                   CylindricalPatch(z_min, z_max, nz, ntheta)};
  for (int i = 0; i < nx; ++i)
    for (int k = 0; k < ny; ++k)
      s.cart.z(i, k) = profile_z(s, std::hypot(s.cart.x(i), s.cart.y(k)), options.corner_cap_fraction);
  for (int i = 0; i < nz; ++i) {
    const double r = tail_r(s.cyl.z(i), params, z_r1);
    for (double& v : s.cyl.r.row(i)) v = r;
  }
  return s;
}

void apply_near(CartesianPatch& cart, const NearPerturbation& p) {
  if (!(p.r_m > 0.0 && p.r_m < cart.half_side()))
    throw ConfigError("near perturbation radius r_m = " + std::to_string(p.r_m) +
                      " must lie in (0, L/2)");
  const double rm2 = p.r_m * p.r_m;
  for (int i = 0; i < cart.nx; ++i)
    for (int k = 0; k < cart.ny; ++k) {
      const double x = cart.x(i);
      const double y = cart.y(k);
      const double r2 = x * x + y * y;
      if (r2 < rm2) cart.z(i, k) += p.a0 * (1.0 + p.a1 * x * y) * (r2 - rm2);
    }
}

double far_factor(const FarPerturbation& p, double z, double theta) {
  if (!(z > p.z_a && z < p.z_b)) return 1.0;
  const double F = (1.0 + 0.25 * std::cos(p.n * theta)) *
                   std::sin(std::numbers::pi * (z - p.z_b) / (p.z_a - p.z_b));
  return 1.0 - p.a0 * F * F;
}

void apply_far(CylindricalPatch& cyl, const FarPerturbation& p) {
  if (p.n < 2 || p.n % 2 != 0)
    throw ConfigError("far perturbation mode n = " + std::to_string(p.n) +
                      " must be even and >= 2: an odd n would give rise to an off-center neck pinch");
  if (!(p.a0 > 0.0 && p.a0 < 1.0))
    throw ConfigError("far perturbation amplitude a0 must lie in (0, 1)");
  if (!(p.z_a < p.z_b && p.z_a > cyl.z_min && p.z_b < cyl.z_max))
    throw ConfigError("far perturbation interval (" + std::to_string(p.z_a) + ", " +
                      std::to_string(p.z_b) + ") must lie inside (z_min, z_max)");
  for (int i = 0; i < cyl.nz; ++i) {
    const double z = cyl.z(i);
    if (!(z > p.z_a && z < p.z_b)) continue;
    for (int k = 0; k < cyl.ntheta; ++k) cyl.r(i, k) *= far_factor(p, z, cyl.theta_signed(k));
  }
}

}  // namespace mcf
