#include "mcf/stencils.hpp"

#include <string>

#include "mcf/errors.hpp"

namespace mcf {

CylDerivs cyl_derivs(const CylindricalPatch& patch, int i, int k) {
  if (i < 1 || i > patch.nz - 2)
    throw IndexError("cyl_derivs: axial index " + std::to_string(i) +
                     " is a boundary row (valid 1.." + std::to_string(patch.nz - 2) + ")");
  const int kk = patch.wrap(k);
  return detail::cyl_derivs_rows(patch.r.row(i - 1).data(), patch.r.row(i).data(),
                                 patch.r.row(i + 1).data(), kk, patch.wrap(kk - 1),
                                 patch.wrap(kk + 1), patch.dz(), patch.dtheta());
}

CartDerivs cart_derivs(const CartesianPatch& patch, int i, int k) {
  if (i < 1 || i > patch.nx - 2 || k < 1 || k > patch.ny - 2)
    throw IndexError("cart_derivs: node (" + std::to_string(i) + ", " + std::to_string(k) +
                     ") is not interior");
  return detail::cart_derivs_rows(patch.z.row(i - 1).data(), patch.z.row(i).data(),
                                  patch.z.row(i + 1).data(), k, patch.dx(), patch.dy());
}

}  // namespace mcf
