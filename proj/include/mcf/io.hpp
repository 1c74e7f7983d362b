#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "mcf/diagnostics.hpp"
#include "mcf/flow.hpp"
#include "mcf/initial_data.hpp"

namespace mcf {

enum class PerturbationKind { None, Near, Far };

struct RunConfig {
  double gamma = 0.75;
  double c = 1.0;
  double tau0 = 4.0;
  std::optional<double> R1;

  int Nx = 65;
  int Ny = 65;
  int Nz = 128;
  int Ntheta = 64;
  double safety = 0.1;
  double zmax_radius_fraction = 0.985;

  PerturbationKind perturbation = PerturbationKind::None;
  NearPerturbation near;
  FarPerturbation far;
  // Far dimple support given as tail radii (fractions of r0) when z_a / z_b are absent.
  double far_radius_a = 0.95;
  double far_radius_b = 0.97;
  std::optional<double> z_a;
  std::optional<double> z_b;

  std::optional<double> r_min_floor;  // defaults to 1e-3 * r0
  double curvature_ceiling = std::numeric_limits<double>::infinity();
  double t_max = std::numeric_limits<double>::infinity();
  long max_steps = 1000000;

  int snapshot_every = 0;  // 0: initial and final snapshots only
  int series_every = 10;
  int modes = 4;
  int mismatch_samples = 32;
  bool parallel = true;
  std::string output_dir = "out";
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, repeated
/// keys, malformed or out-of-range values raise ParseError with the line.
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::filesystem::path& path);

/// Builds the initial flow state (patches plus perturbation) for a config.
struct PreparedRun {
  FlowParams params;
  InitialSurface surface;
  FlowState state;
  StopCriteria stop;
  RecordOptions record;
};
PreparedRun prepare_run(const RunConfig& config);

/// Writes cart_<index>.csv and cyl_<index>.csv. Throws std::runtime_error
/// naming the path on I/O failure.
void write_snapshot(const FlowState& state, const std::filesystem::path& dir, int index);

struct Snapshot {
  CartesianPatch cart;
  CylindricalPatch cyl;
};

/// Reads a snapshot pair back; grid geometry is recovered from the node table.
Snapshot read_snapshot(const std::filesystem::path& dir, int index);

void write_series(const DiagnosticsSeries& series, const std::filesystem::path& dir);
DiagnosticsSeries read_series(const std::filesystem::path& file);

/// Decimal form with 17 significant digits (exact round trip).
std::string format_double(double v);

}  // namespace mcf
