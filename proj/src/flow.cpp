#include "mcf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcf/diagnostics.hpp"
#include "mcf/errors.hpp"
#include "mcf/kernels.hpp"
#include "mcf/stencils.hpp"

namespace mcf {
namespace {

double min_radius(const CylindricalPatch& cyl, bool parallel) {
  return parallel ? kernels::min_value_parallel(cyl.r) : kernels::min_value_serial(cyl.r);
}

void check_finite(const Grid2D& g, const char* patch) {
  const long at = kernels::first_non_finite(g);
  if (at >= 0)
    throw NumericalBlowup(std::string("non-finite value in ") + patch + " patch at node (" +
                          std::to_string(at / g.cols()) + ", " + std::to_string(at % g.cols()) +
                          ")");
}

bool uses_cyl(PatchMode m) { return m != PatchMode::CartesianOnly; }
bool uses_cart(PatchMode m) { return m != PatchMode::CylindricalOnly; }

}  // namespace

double rhs_cylindrical(const CylindricalPatch& patch, int i, int k, double r_singular_floor) {
  const CylDerivs d = cyl_derivs(patch, i, k);
  const double r = patch.r(i, patch.wrap(k));
  if (r <= r_singular_floor)
    throw SingularityReached("rhs_cylindrical: r = " + std::to_string(r) + " at node (" +
                             std::to_string(i) + ", " + std::to_string(k) + ")");
  return kernels::cylindrical_rate(d, r);
}

double rhs_cartesian(const CartesianPatch& patch, int i, int k) {
  return kernels::cartesian_rate(cart_derivs(patch, i, k));
}

double cfl_dt(const FlowState& state, double safety) {
  if (!(safety > 0.0 && safety <= 1.0))
    throw ConfigError("cfl_dt: safety must lie in (0, 1], got " + std::to_string(safety));
  double h2 = std::numeric_limits<double>::infinity();
  if (uses_cart(state.mode)) {
    h2 = std::min({h2, state.cart.dx() * state.cart.dx(), state.cart.dy() * state.cart.dy()});
  }
  if (uses_cyl(state.mode)) {
    const double r_min = kernels::min_value_parallel(state.cyl.r);
    if (!(r_min > 0.0))
      throw SingularityReached("cfl_dt: minimum radius " + std::to_string(r_min) + " <= 0");
    const double arc = r_min * state.cyl.dtheta();
    h2 = std::min({h2, state.cyl.dz() * state.cyl.dz(), arc * arc});
  }
  return safety * h2;
}

StepReport prepare(FlowState& state, const StepOptions& opts) {
  StepReport rep;
  state.cart.t = state.t;
  state.cyl.t = state.t;
  if (state.mode == PatchMode::Overlap)
    rep.regrids = exchange_or_regrid(state.cart, state.cyl, state.overlap, opts.regrid, &rep.exchange);
  return rep;
}

StepReport step(FlowState& state, const StepOptions& opts) {
  StepReport rep;
  if (uses_cyl(state.mode)) {
    const double r_min = min_radius(state.cyl, opts.parallel);
    if (r_min <= opts.r_singular_floor)
      throw SingularityReached("step: minimum radius " + std::to_string(r_min) +
                               " at or below the singular floor");
  }
  const double dt = std::min(cfl_dt(state, opts.safety), opts.dt_cap);
  if (!(dt > 0.0)) throw ConfigError("step: non-positive time step");

  if (uses_cart(state.mode)) {
    Grid2D next = state.cart.z;
    if (opts.parallel)
      kernels::advance_cartesian_parallel(state.cart, dt, next);
    else
      kernels::advance_cartesian_serial(state.cart, dt, next);
    state.cart.z = std::move(next);
  }
  if (uses_cyl(state.mode)) {
    Grid2D next = state.cyl.r;
    if (opts.parallel)
      kernels::advance_cylindrical_parallel(state.cyl, dt, next);
    else
      kernels::advance_cylindrical_serial(state.cyl, dt, next);
    // Far end (and, without a tip patch, the near end) follows the round
    // cylinder law dr/dt = -1/r.
    auto cylinder_law = [&](int row) {
      for (double& r : next.row(row)) r += dt * (-1.0 / r);
    };
    cylinder_law(state.cyl.nz - 1);
    if (state.mode == PatchMode::CylindricalOnly) cylinder_law(0);
    state.cyl.r = std::move(next);
  }

  state.t += dt;
  state.cart.t = state.t;
  state.cyl.t = state.t;
  state.dt_last = dt;
  ++state.step_count;
  rep.dt = dt;

  if (state.mode == PatchMode::CartesianOnly && opts.cartesian_boundary) {
    CartesianPatch& c = state.cart;
    for (int i = 0; i < c.nx; ++i)
      for (int k = 0; k < c.ny; ++k)
        if (c.on_perimeter(i, k)) c.z(i, k) = opts.cartesian_boundary(c.x(i), c.y(k), state.t);
  }
  if (state.mode == PatchMode::Overlap)
    rep.regrids = exchange_or_regrid(state.cart, state.cyl, state.overlap, opts.regrid, &rep.exchange);

  if (uses_cart(state.mode)) check_finite(state.cart.z, "Cartesian");
  if (uses_cyl(state.mode)) check_finite(state.cyl.r, "cylindrical");
  return rep;
}

std::string_view to_string(Termination reason) {
  switch (reason) {
    case Termination::MaxSteps: return "max_steps";
    case Termination::TMax: return "t_max";
    case Termination::RMinFloor: return "r_min_floor";
    case Termination::CurvatureCeiling: return "curvature_ceiling";
    case Termination::Singularity: return "singularity";
    case Termination::NumericalBlowup: return "numerical_blowup";
    case Termination::OverlapFailure: return "overlap_failure";
  }
  return "unknown";
}

RunResult run(FlowState& state, const StopCriteria& stop, const RunOptions& opts) {
  RunResult result;
  StepOptions step_opts = opts.step;
  const int stride = std::max(1, opts.hook_stride);
  long last_hooked = -1;
  StepReport last_rep;

  auto call_hook = [&](const StepReport& rep) {
    if (opts.hook && last_hooked != state.step_count) {
      opts.hook(state, rep);
      last_hooked = state.step_count;
    }
  };
  auto finish = [&](Termination why, std::string msg) {
    call_hook(last_rep);
    result.reason = why;
    result.message = std::move(msg);
    return result;
  };

  try {
    last_rep = prepare(state, step_opts);
  } catch (const ConfigError& e) {
    return finish(Termination::OverlapFailure, e.what());
  }
  call_hook(last_rep);

  while (true) {
    if (result.steps >= stop.max_steps) return finish(Termination::MaxSteps, "step limit reached");
    if (state.t >= stop.t_max) return finish(Termination::TMax, "final time reached");
    step_opts.dt_cap = stop.t_max - state.t;
    try {
      last_rep = step(state, step_opts);
    } catch (const SingularityReached& e) {
      return finish(Termination::Singularity, e.what());
    } catch (const NumericalBlowup& e) {
      return finish(Termination::NumericalBlowup, e.what());
    } catch (const ConfigError& e) {
      return finish(Termination::OverlapFailure, e.what());
    } catch (const Error& e) {
      return finish(Termination::OverlapFailure, e.what());
    }
    ++result.steps;

    if (uses_cyl(state.mode)) {
      const double r_min = min_radius(state.cyl, step_opts.parallel);
      if (r_min <= stop.r_min_floor)
        return finish(Termination::RMinFloor, "minimum radius " + std::to_string(r_min) +
                                                  " reached the floor");
    }
    if (state.step_count % stride == 0) {
      call_hook(last_rep);
      if (uses_cart(state.mode) && std::isfinite(stop.curvature_ceiling)) {
        const double a = tip_curvature(state.cart).value;
        if (a >= stop.curvature_ceiling)
          return finish(Termination::CurvatureCeiling,
                        "tip curvature " + std::to_string(a) + " reached the ceiling");
      }
    }
  }
}

}  // namespace mcf
