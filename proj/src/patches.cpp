#include "mcf/patches.hpp"

#include <cmath>
#include <string>

#include "mcf/errors.hpp"

namespace mcf {

CartesianPatch::CartesianPatch(double side, int nx_, int ny_, double time)
    : L(side), nx(nx_), ny(ny_), t(time) {
  if (nx < 5 || ny < 5)
    throw ConfigError("CartesianPatch: need at least 5 nodes per side, got " +
                      std::to_string(nx) + "x" + std::to_string(ny));
  if (!(side > 0.0) || !std::isfinite(side))
    throw ConfigError("CartesianPatch: side length must be positive");
  z = Grid2D(nx, ny, 0.0);
}

CylindricalPatch::CylindricalPatch(double z_lo, double z_hi, int nz_, int ntheta_, double time)
    : z_min(z_lo), z_max(z_hi), nz(nz_), ntheta(ntheta_), t(time) {
  if (!(z_lo < z_hi)) throw ConfigError("CylindricalPatch: require z_min < z_max");
  if (nz < 5) throw ConfigError("CylindricalPatch: need at least 5 axial nodes");
  if (ntheta < 4 || ntheta % 2 != 0)
    throw ConfigError("CylindricalPatch: angular count must be even and >= 4, got " +
                      std::to_string(ntheta));
  r = Grid2D(nz, ntheta, 1.0);
}

}  // namespace mcf
