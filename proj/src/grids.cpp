#include "mcf/grids.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/interpolators/makima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "mcf/errors.hpp"

namespace mcf {
namespace {

// Interpolation without the one-cell margin check; queries outside the grid
// are extrapolated from the nearest cell. Used internally where the caller
// has already established that the point is covered.
double bilinear_cart(const CartesianPatch& p, double x, double y) {
  const double u = x / p.dx() + 0.5 * (p.nx - 1);
  const double v = y / p.dy() + 0.5 * (p.ny - 1);
  const int i = std::clamp(static_cast<int>(std::floor(u)), 0, p.nx - 2);
  const int k = std::clamp(static_cast<int>(std::floor(v)), 0, p.ny - 2);
  const double fx = u - i;
  const double fy = v - k;
  return std::lerp(std::lerp(p.z(i, k), p.z(i, k + 1), fy),
                   std::lerp(p.z(i + 1, k), p.z(i + 1, k + 1), fy), fx);
}

// Four-point Lagrange stencil around fractional index u on [0, n-1]. The
// window is shifted inwards at the ends so it never leaves the grid.
struct CubicStencil {
  int first;
  double w[4];
};

CubicStencil cubic_stencil(double u, int n) {
  const int i = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, n - 4);
  const double s = u - i;  // position relative to node i, nominally in [1, 2]
  CubicStencil c{i, {}};
  c.w[0] = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
  c.w[1] = s * (s - 2.0) * (s - 3.0) / 2.0;
  c.w[2] = -s * (s - 1.0) * (s - 3.0) / 2.0;
  c.w[3] = s * (s - 1.0) * (s - 2.0) / 6.0;
  return c;
}

struct AngularWeights {
  int k0;
  int k1;
  double frac;
};

AngularWeights angular_weights(const CylindricalPatch& p, double theta) {
  // Reduce in radians first so that theta and theta + 2*pi (when that sum is
  // exact) reach the division with identical bits.
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double v = (theta - two_pi * std::floor(theta / two_pi)) / p.dtheta();
  if (v < 0.0) v = 0.0;
  int k = static_cast<int>(std::floor(v));
  if (k >= p.ntheta) {
    k = 0;
    v = 0.0;
  }
  return {k, k + 1 == p.ntheta ? 0 : k + 1, v - k};
}

double row_at(const CylindricalPatch& p, int i, const AngularWeights& w) {
  return std::lerp(p.r(i, w.k0), p.r(i, w.k1), w.frac);
}

double bilinear_cyl(const CylindricalPatch& p, double z, double theta) {
  const AngularWeights w = angular_weights(p, theta);
  const double u = (z - p.z_min) / p.dz();
  const int i = std::clamp(static_cast<int>(std::floor(u)), 0, p.nz - 2);
  const double fz = u - i;
  return std::lerp(row_at(p, i, w), row_at(p, i + 1, w), fz);
}

std::string point_str(double a, double b) {
  std::ostringstream os;
  os.precision(10);
  os << "(" << a << ", " << b << ")";
  return os.str();
}

template <class F>
double solve_bracketed(F&& f, double a, double b, double fa, double fb) {
  using boost::math::tools::eps_tolerance;
  std::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      f, a, b, fa, fb, eps_tolerance<double>(std::numeric_limits<double>::digits - 2), max_iter);
  return 0.5 * (bracket.first + bracket.second);
}

double monotone_slack(double scale) { return 1e-12 * (1.0 + std::abs(scale)); }

}  // namespace

double sample_cartesian(const CartesianPatch& patch, double x, double y) {
  const double reach_x = (patch.half_side() - patch.dx()) * (1.0 + 1e-12);
  const double reach_y = (patch.half_side() - patch.dy()) * (1.0 + 1e-12);
  if (!(std::abs(x) <= reach_x && std::abs(y) <= reach_y))
    throw DomainError("sample_cartesian: point " + point_str(x, y) +
                      " is not one cell inside the Cartesian patch of side " +
                      std::to_string(patch.L));
  return bilinear_cart(patch, x, y);
}

double sample_cylindrical(const CylindricalPatch& patch, double z, double theta) {
  const double dz = patch.dz();
  const double slack = 1e-12 * (patch.z_max - patch.z_min);
  if (!(z >= patch.z_min + dz - slack && z <= patch.z_max - dz + slack))
    throw DomainError("sample_cylindrical: z = " + std::to_string(z) +
                      " outside the cylindrical patch sampling range [" +
                      std::to_string(patch.z_min + dz) + ", " + std::to_string(patch.z_max - dz) +
                      "]");
  return bilinear_cyl(patch, z, theta);
}

double radial_root(const CartesianPatch& patch, double theta, double z_target) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double reach = patch.half_side() - std::max(patch.dx(), patch.dy());
  const double s_max = reach / std::max(std::abs(c), std::abs(s));
  const int n = std::max(2, static_cast<int>(std::ceil(s_max / (0.5 * std::min(patch.dx(), patch.dy())))));
  auto f = [&](double sv) { return bilinear_cart(patch, sv * c, sv * s) - z_target; };

  double f_prev = f(0.0);
  if (f_prev > 0.0)
    throw OverlapViolation(OverlapViolation::Kind::CircleBelowTip,
                           "radial_root: level " + std::to_string(z_target) +
                               " lies below the Cartesian surface at the axis");
  if (f_prev == 0.0) return 0.0;
  double s_prev = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double sj = s_max * j / n;
    const double fj = f(sj);
    if (fj < f_prev - monotone_slack(z_target))
      throw GeometryError("radial_root: surface falls along theta = " + std::to_string(theta) +
                          " before reaching level " + std::to_string(z_target));
    if (fj >= 0.0) {
      if (j < n) {
        const double f_next = f(s_max * (j + 1) / n);
        if (f_next < fj - monotone_slack(z_target))
          throw GeometryError("radial_root: surface not monotone along theta = " +
                              std::to_string(theta) + " near radius " + std::to_string(sj));
      }
      if (fj == 0.0) return sj;
      return solve_bracketed(f, s_prev, sj, f_prev, fj);
    }
    s_prev = sj;
    f_prev = fj;
  }
  throw OverlapViolation(OverlapViolation::Kind::CircleOutsideSquare,
                         "radial_root: level " + std::to_string(z_target) +
                             " not reached inside the square along theta = " +
                             std::to_string(theta));
}

double axial_root(const CylindricalPatch& patch, double theta, double r_target) {
  const AngularWeights w = angular_weights(patch, theta);
  const double dz = patch.dz();
  double f_prev = row_at(patch, 1, w) - r_target;
  if (f_prev > 0.0)
    throw OverlapViolation(OverlapViolation::Kind::PerimeterBelowPatch,
                           "axial_root: radius " + std::to_string(r_target) +
                               " is inside the first sampled row of the cylindrical patch");
  if (f_prev == 0.0) return patch.z_min + dz;
  for (int i = 2; i <= patch.nz - 2; ++i) {
    const double fi = row_at(patch, i, w) - r_target;
    if (fi < f_prev - monotone_slack(r_target))
      throw GeometryError("axial_root: radius decreases in z along theta = " +
                          std::to_string(theta) + " below the crossing, near z = " +
                          std::to_string(patch.z(i)));
    if (fi >= 0.0) {
      if (i + 1 <= patch.nz - 2) {
        const double f_next = row_at(patch, i + 1, w) - r_target;
        if (f_next < fi - monotone_slack(r_target))
          throw GeometryError("axial_root: radius not monotone in z along theta = " +
                              std::to_string(theta) + " near z = " + std::to_string(patch.z(i)));
      }
      // Along a fixed angle the interpolant is linear in z within a cell, so
      // the secant step lands on the root exactly.
      return patch.z(i - 1) + dz * (-f_prev / (fi - f_prev));
    }
    f_prev = fi;
  }
  throw OverlapViolation(OverlapViolation::Kind::PerimeterBeyondPatch,
                         "axial_root: radius " + std::to_string(r_target) +
                             " never reached by the cylindrical patch along theta = " +
                             std::to_string(theta));
}

ExchangeReport exchange_boundaries(CartesianPatch& cart, CylindricalPatch& cyl,
                                   const OverlapState& overlap) {
  if (cart.t != cyl.t)
    throw Error("exchange_boundaries: patches are at different times (" + std::to_string(cart.t) +
                " vs " + std::to_string(cyl.t) + ")");
  ExchangeReport rep;
  const double half = cart.half_side();

  std::vector<double> ring(cyl.ntheta);
  rep.circle_min_radius = std::numeric_limits<double>::infinity();
  rep.circle_max_radius = 0.0;
  for (int k = 0; k < cyl.ntheta; ++k) {
    ring[k] = radial_root(cart, cyl.theta_signed(k), cyl.z_min);
    rep.circle_min_radius = std::min(rep.circle_min_radius, ring[k]);
    rep.circle_max_radius = std::max(rep.circle_max_radius, ring[k]);
  }
  if (rep.circle_min_radius < overlap.margin_fraction * half)
    throw OverlapViolation(OverlapViolation::Kind::CircleTooSmall,
                           "exchange: z_min circle radius " + std::to_string(rep.circle_min_radius) +
                               " below " + std::to_string(overlap.margin_fraction) + " * L/2");
  if (rep.circle_max_radius > (1.0 - overlap.margin_fraction) * half)
    throw OverlapViolation(OverlapViolation::Kind::CircleTooLarge,
                           "exchange: z_min circle radius " + std::to_string(rep.circle_max_radius) +
                               " above " + std::to_string(1.0 - overlap.margin_fraction) +
                               " * L/2");

  const double z_floor = cyl.z_min + overlap.perimeter_gap_cells * cyl.dz();
  std::vector<double> perim;
  perim.reserve(2 * (cart.nx + cart.ny));
  rep.perimeter_min_z = std::numeric_limits<double>::infinity();
  rep.perimeter_max_z = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < cart.nx; ++i) {
    for (int k = 0; k < cart.ny; ++k) {
      if (!cart.on_perimeter(i, k)) continue;
      const double x = cart.x(i);
      const double y = cart.y(k);
      double zp = 0.0;
      try {
        zp = axial_root(cyl, std::atan2(y, x), std::hypot(x, y));
      } catch (const GeometryError& e) {
        // The square reaches past a neck or bulge of the cylinder.
        throw OverlapViolation(OverlapViolation::Kind::PerimeterBeyondPatch,
                               std::string("exchange: ") + e.what());
      }
      if (zp < z_floor)
        throw OverlapViolation(OverlapViolation::Kind::PerimeterTooLow,
                               "exchange: perimeter node maps to z = " + std::to_string(zp) +
                                   ", within " + std::to_string(overlap.perimeter_gap_cells) +
                                   " cells of z_min");
      rep.perimeter_min_z = std::min(rep.perimeter_min_z, zp);
      rep.perimeter_max_z = std::max(rep.perimeter_max_z, zp);
      perim.push_back(zp);
    }
  }

  std::size_t n = 0;
  for (int i = 0; i < cart.nx; ++i)
    for (int k = 0; k < cart.ny; ++k)
      if (cart.on_perimeter(i, k)) cart.z(i, k) = perim[n++];
  std::copy(ring.begin(), ring.end(), cyl.r.row(0).begin());
  return rep;
}

double measure_overlap_mismatch(const CartesianPatch& cart, const CylindricalPatch& cyl,
                                int n_samples) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (n_samples <= 0) return 0.0;
  const auto first_row = cyl.r.row(1);
  const double rho_lo = *std::max_element(first_row.begin(), first_row.end()) * (1.0 + 1e-9);
  const double rho_hi = cart.half_side() - std::max(cart.dx(), cart.dy());
  if (!(rho_lo < rho_hi)) return inf;

  constexpr double golden = 0.6180339887498949;
  double worst = 0.0;
  for (int j = 0; j < n_samples; ++j) {
    const double frac = j * golden - std::floor(j * golden);
    const double theta = 2.0 * std::numbers::pi * frac;
    const double rho = rho_lo + (j + 0.5) / n_samples * (rho_hi - rho_lo);
    try {
      const double z_cart = sample_cartesian(cart, rho * std::cos(theta), rho * std::sin(theta));
      const double z_cyl = axial_root(cyl, theta, rho);
      worst = std::max(worst, std::abs(z_cart - z_cyl));
    } catch (const Error&) {
      return inf;
    }
  }
  return worst;
}

std::pair<CartesianPatch, CylindricalPatch> regrid(const CartesianPatch& cart,
                                                   const CylindricalPatch& cyl, double new_L,
                                                   double new_z_min) {
  if (!(new_L > 0.0) || !std::isfinite(new_L))
    throw ConfigError("regrid: invalid square side " + std::to_string(new_L));
  if (!(new_z_min < cyl.z_max))
    throw ConfigError("regrid: z_min " + std::to_string(new_z_min) + " not below z_max");

  CartesianPatch nc(new_L, cart.nx, cart.ny, cart.t);
  const double old_half = cart.half_side() * (1.0 + 1e-12);
  // Modified Akima along x on every old grid line, then along y per new node:
  // third order in smooth regions without overshoot at the initial slope kink.
  std::vector<double> xs(cart.nx), ys(cart.ny);
  for (int i = 0; i < cart.nx; ++i) xs[i] = cart.x(i);
  for (int k = 0; k < cart.ny; ++k) ys[k] = cart.y(k);
  // Offsets from one node keep constant fields exact.
  const double base = cart.z(0, 0);
  std::vector<boost::math::interpolators::makima<std::vector<double>>> along_x;
  along_x.reserve(cart.ny);
  for (int k = 0; k < cart.ny; ++k) {
    std::vector<double> zk(cart.nx);
    for (int i = 0; i < cart.nx; ++i) zk[i] = cart.z(i, k) - base;
    along_x.emplace_back(std::vector<double>(xs), std::move(zk));
  }
  auto smooth_cart = [&](double x, double y) {
    x = std::clamp(x, xs.front(), xs.back());
    y = std::clamp(y, ys.front(), ys.back());
    std::vector<double> column(cart.ny);
    for (int k = 0; k < cart.ny; ++k) column[k] = along_x[k](x);
    const boost::math::interpolators::makima<std::vector<double>> along_y(std::vector<double>(ys),
                                                                        std::move(column));
    return base + along_y(y);
  };
  for (int i = 0; i < nc.nx; ++i) {
    for (int k = 0; k < nc.ny; ++k) {
      const double x = nc.x(i);
      const double y = nc.y(k);
      if (std::abs(x) <= old_half && std::abs(y) <= old_half) {
        nc.z(i, k) = smooth_cart(x, y);
      } else {
        try {
          nc.z(i, k) = axial_root(cyl, std::atan2(y, x), std::hypot(x, y));
        } catch (const Error& e) {
          throw ConfigError("regrid: Cartesian node " + point_str(x, y) +
                            " not coverable: " + e.what());
        }
      }
    }
  }

  CylindricalPatch ny(new_z_min, cyl.z_max, cyl.nz, cyl.ntheta, cyl.t);
  const double old_lo = cyl.z_min - 1e-12 * (cyl.z_max - cyl.z_min);
  for (int i = 0; i < ny.nz; ++i) {
    const double z = ny.z(i);
    if (z >= old_lo) {
      // Both patches share the theta nodes, so only z needs interpolating.
      const CubicStencil c = cubic_stencil((z - cyl.z_min) / cyl.dz(), cyl.nz);
      for (int k = 0; k < ny.ntheta; ++k) {
        // Summing offsets from one stencil node keeps constant columns exact.
        const double base = cyl.r(c.first + 1, k);
        double v = 0.0;
        for (int a = 0; a < 4; ++a) v += c.w[a] * (cyl.r(c.first + a, k) - base);
        ny.r(i, k) = base + v;
      }
    } else {
      for (int k = 0; k < ny.ntheta; ++k) {
        try {
          ny.r(i, k) = radial_root(cart, ny.theta_signed(k), z);
        } catch (const Error& e) {
          throw ConfigError("regrid: cylindrical row z = " + std::to_string(z) +
                            " not coverable: " + e.what());
        }
      }
    }
  }
  return {std::move(nc), std::move(ny)};
}

double circle_level(const CartesianPatch& cart, double radius, int n_angles) {
  double sum = 0.0;
  for (int j = 0; j < n_angles; ++j) {
    const double th = 2.0 * std::numbers::pi * j / n_angles;
    sum += bilinear_cart(cart, radius * std::cos(th), radius * std::sin(th));
  }
  return sum / n_angles;
}

int exchange_or_regrid(CartesianPatch& cart, CylindricalPatch& cyl, const OverlapState& overlap,
                       const RegridPolicy& policy, ExchangeReport* report) {
  int regrids = 0;
  std::string last;
  for (int attempt = 0; attempt <= policy.max_attempts; ++attempt) {
    try {
      const ExchangeReport rep = exchange_boundaries(cart, cyl, overlap);
      if (report) *report = rep;
      return regrids;
    } catch (const OverlapViolation& v) {
      last = v.what();
      double L = cart.L;
      double fraction = policy.circle_target_fraction;
      if (v.kind() == OverlapViolation::Kind::PerimeterBeyondPatch) L *= policy.shrink_factor;
      if (v.kind() == OverlapViolation::Kind::PerimeterTooLow) fraction = policy.low_circle_fraction;
      const double z_min = circle_level(cart, fraction * 0.5 * L);
      if (L == cart.L && std::abs(z_min - cyl.z_min) <= 1e-12 * (1.0 + std::abs(z_min)))
        throw ConfigError("overlap cannot be restored: " + last);
      auto [nc, ny] = regrid(cart, cyl, L, z_min);
      cart = std::move(nc);
      cyl = std::move(ny);
      ++regrids;
    }
  }
  throw ConfigError("overlap not restored after " + std::to_string(regrids) +
                    " regrids: " + last);
}

}  // namespace mcf
