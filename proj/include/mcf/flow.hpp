#pragma once

#include <functional>
#include <limits>
#include <string>
#include <string_view>

#include "mcf/grids.hpp"
#include "mcf/patches.hpp"

namespace mcf {

/// Which patches take part in the evolution. Overlap is the production mode;
/// the single-patch modes exist for exact-solution checks.
enum class PatchMode { Overlap, CylindricalOnly, CartesianOnly };

struct FlowState {
  PatchMode mode = PatchMode::Overlap;
  CartesianPatch cart;
  CylindricalPatch cyl;
  double t = 0.0;
  long step_count = 0;
  double dt_last = 0.0;
  OverlapState overlap;
};

struct StopCriteria {
  double r_min_floor = 1e-8;
  double curvature_ceiling = std::numeric_limits<double>::infinity();
  double t_max = std::numeric_limits<double>::infinity();
  long max_steps = std::numeric_limits<long>::max();
};

/// Height imposed on the Cartesian perimeter in CartesianOnly mode, as a
/// function of (x, y, t).
using BoundaryFn = std::function<double(double, double, double)>;

struct StepOptions {
  double safety = 0.1;
  double r_singular_floor = 1e-8;
  double dt_cap = std::numeric_limits<double>::infinity();
  bool parallel = true;
  RegridPolicy regrid;
  BoundaryFn cartesian_boundary;  // CartesianOnly; empty keeps the perimeter fixed
};

struct StepReport {
  double dt = 0.0;
  int regrids = 0;
  ExchangeReport exchange;
};

/// dr/dt at interior node (i, k). Throws SingularityReached when r <= floor.
double rhs_cylindrical(const CylindricalPatch& patch, int i, int k, double r_singular_floor = 1e-8);

/// dz/dt at interior node (i, k).
double rhs_cartesian(const CartesianPatch& patch, int i, int k);

/// safety * min(dx^2, dy^2, dz^2, (r_min dtheta)^2) over the active patches.
double cfl_dt(const FlowState& state, double safety);

/// Brings a freshly built state into a consistent overlap (exchange, regrid if needed).
StepReport prepare(FlowState& state, const StepOptions& opts);

/// One forward-Euler step of both patches followed by boundary exchange and,
/// if the overlap drifted out of bounds, regridding.
StepReport step(FlowState& state, const StepOptions& opts);

enum class Termination {
  MaxSteps,
  TMax,
  RMinFloor,
  CurvatureCeiling,
  Singularity,
  NumericalBlowup,
  OverlapFailure,
};

std::string_view to_string(Termination reason);

struct RunResult {
  Termination reason = Termination::MaxSteps;
  std::string message;
  long steps = 0;
};

using StepHook = std::function<void(const FlowState&, const StepReport&)>;

struct RunOptions {
  StepOptions step;
  int hook_stride = 1;
  StepHook hook;  // also called once before the first step and on the final state
};

/// Steps until a stop criterion fires. Step errors are reported through the
/// termination reason rather than thrown.
RunResult run(FlowState& state, const StopCriteria& stop, const RunOptions& opts);

}  // namespace mcf
