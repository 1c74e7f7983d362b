#include "mcf/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "mcf/errors.hpp"

namespace mcf {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view v, int line, std::string_view key) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
    throw ParseError(line, "value of '" + std::string(key) + "' is not a finite number: '" +
                               std::string(v) + "'");
  return out;
}

long to_long(std::string_view v, int line, std::string_view key) {
  long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ParseError(line, "value of '" + std::string(key) + "' is not an integer: '" +
                               std::string(v) + "'");
  return out;
}

void require(bool ok, int line, const std::string& what) {
  if (!ok) throw ParseError(line, what);
}

using Setter = std::function<void(RunConfig&, std::string_view, int)>;

Setter positive(double RunConfig::*field, const char* name) {
  return [=](RunConfig& c, std::string_view v, int line) {
    const double x = to_double(v, line, name);
    require(x > 0.0, line, std::string(name) + " must be positive");
    c.*field = x;
  };
}

Setter grid_count(int RunConfig::*field, const char* name, int min) {
  return [=](RunConfig& c, std::string_view v, int line) {
    const long x = to_long(v, line, name);
    require(x >= min && x <= 1 << 16, line,
            std::string(name) + " must be at least " + std::to_string(min));
    c.*field = static_cast<int>(x);
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"gamma",
       [](RunConfig& c, std::string_view v, int line) {
         c.gamma = to_double(v, line, "gamma");
         require(c.gamma > 0.5, line, "gamma must exceed 1/2 (the critical case is not supported)");
       }},
      {"c", positive(&RunConfig::c, "c")},
      {"tau0", [](RunConfig& c, std::string_view v, int line) { c.tau0 = to_double(v, line, "tau0"); }},
      {"R1",
       [](RunConfig& c, std::string_view v, int line) {
         const double x = to_double(v, line, "R1");
         require(x > 0.0, line, "R1 must be positive");
         c.R1 = x;
       }},
      {"Nx", grid_count(&RunConfig::Nx, "Nx", 5)},
      {"Ny", grid_count(&RunConfig::Ny, "Ny", 5)},
      {"Nz", grid_count(&RunConfig::Nz, "Nz", 5)},
      {"Ntheta",
       [](RunConfig& c, std::string_view v, int line) {
         const long x = to_long(v, line, "Ntheta");
         require(x >= 4 && x % 2 == 0 && x <= 1 << 16, line, "Ntheta must be even and at least 4");
         c.Ntheta = static_cast<int>(x);
       }},
      {"safety",
       [](RunConfig& c, std::string_view v, int line) {
         c.safety = to_double(v, line, "safety");
         require(c.safety > 0.0 && c.safety <= 1.0, line, "safety must lie in (0, 1]");
       }},
      {"zmax_radius_fraction",
       [](RunConfig& c, std::string_view v, int line) {
         c.zmax_radius_fraction = to_double(v, line, "zmax_radius_fraction");
         require(c.zmax_radius_fraction > 0.0 && c.zmax_radius_fraction < 1.0, line,
                 "zmax_radius_fraction must lie in (0, 1)");
       }},
      {"perturbation",
       [](RunConfig& c, std::string_view v, int line) {
         if (v == "none")
           c.perturbation = PerturbationKind::None;
         else if (v == "near")
           c.perturbation = PerturbationKind::Near;
         else if (v == "far")
           c.perturbation = PerturbationKind::Far;
         else
           throw ParseError(line, "perturbation must be none, near or far");
       }},
      {"a0",
       [](RunConfig& c, std::string_view v, int line) {
         c.near.a0 = c.far.a0 = to_double(v, line, "a0");
       }},
      {"a1", [](RunConfig& c, std::string_view v, int line) { c.near.a1 = to_double(v, line, "a1"); }},
      {"r_m",
       [](RunConfig& c, std::string_view v, int line) {
         c.near.r_m = to_double(v, line, "r_m");
         require(c.near.r_m > 0.0, line, "r_m must be positive");
       }},
      {"z_a", [](RunConfig& c, std::string_view v, int line) { c.z_a = to_double(v, line, "z_a"); }},
      {"z_b", [](RunConfig& c, std::string_view v, int line) { c.z_b = to_double(v, line, "z_b"); }},
      {"far_radius_a",
       [](RunConfig& c, std::string_view v, int line) {
         c.far_radius_a = to_double(v, line, "far_radius_a");
         require(c.far_radius_a > 0.0 && c.far_radius_a < 1.0, line, "far_radius_a must lie in (0, 1)");
       }},
      {"far_radius_b",
       [](RunConfig& c, std::string_view v, int line) {
         c.far_radius_b = to_double(v, line, "far_radius_b");
         require(c.far_radius_b > 0.0 && c.far_radius_b < 1.0, line, "far_radius_b must lie in (0, 1)");
       }},
      {"n",
       [](RunConfig& c, std::string_view v, int line) {
         const long n = to_long(v, line, "n");
         require(n >= 2 && n % 2 == 0, line,
                 "n must be even and at least 2: an odd n would give rise to an off-center neck pinch");
         c.far.n = static_cast<int>(n);
       }},
      {"r_min_floor",
       [](RunConfig& c, std::string_view v, int line) {
         const double x = to_double(v, line, "r_min_floor");
         require(x > 0.0, line, "r_min_floor must be positive");
         c.r_min_floor = x;
       }},
      {"curvature_ceiling", positive(&RunConfig::curvature_ceiling, "curvature_ceiling")},
      {"t_max", positive(&RunConfig::t_max, "t_max")},
      {"max_steps",
       [](RunConfig& c, std::string_view v, int line) {
         c.max_steps = to_long(v, line, "max_steps");
         require(c.max_steps >= 0, line, "max_steps must be non-negative");
       }},
      {"snapshot_every",
       [](RunConfig& c, std::string_view v, int line) {
         const long x = to_long(v, line, "snapshot_every");
         require(x >= 0, line, "snapshot_every must be non-negative");
         c.snapshot_every = static_cast<int>(x);
       }},
      {"series_every", grid_count(&RunConfig::series_every, "series_every", 1)},
      {"modes",
       [](RunConfig& c, std::string_view v, int line) {
         const long x = to_long(v, line, "modes");
         require(x >= 0 && x <= 1024, line, "modes must lie in [0, 1024]");
         c.modes = static_cast<int>(x);
       }},
      {"mismatch_samples",
       [](RunConfig& c, std::string_view v, int line) {
         const long x = to_long(v, line, "mismatch_samples");
         require(x >= 0, line, "mismatch_samples must be non-negative");
         c.mismatch_samples = static_cast<int>(x);
       }},
      {"parallel",
       [](RunConfig& c, std::string_view v, int line) {
         if (v == "true" || v == "1")
           c.parallel = true;
         else if (v == "false" || v == "0")
           c.parallel = false;
         else
           throw ParseError(line, "parallel must be true or false");
       }},
      {"output_dir",
       [](RunConfig& c, std::string_view v, int line) {
         require(!v.empty(), line, "output_dir must not be empty");
         c.output_dir = std::string(v);
       }},
  };
  return table;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& p) {
  out.flush();
  if (!out) throw std::runtime_error("write to " + p.string() + " failed");
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path& p,
                                          std::string_view expected_header, std::size_t columns,
                                          std::string* header_out = nullptr) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(p.string() + ": missing header");
  if (!expected_header.empty() && line != expected_header)
    throw std::runtime_error(p.string() + ": unexpected header '" + line + "'");
  if (header_out) *header_out = line;
  if (columns == 0) columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view cell = rest.substr(0, comma);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw std::runtime_error(p.string() + ":" + std::to_string(lineno) + ": bad number '" +
                                 std::string(cell) + "'");
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (row.size() != columns)
      throw std::runtime_error(p.string() + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(columns) + " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

// Number of distinct leading values in a column of row-major blocks.
std::size_t inner_count(const std::vector<std::vector<double>>& rows, std::size_t col) {
  std::size_t n = 1;
  while (n < rows.size() && rows[n][col] == rows[0][col]) ++n;
  return n;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  int last_content = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) last_content = line_no;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second)
      throw ParseError(line_no, "key '" + std::string(key) + "' given twice");
    if (value.empty()) throw ParseError(line_no, "missing value for '" + std::string(key) + "'");
    it->second(cfg, value, line_no);
    if (end == text.size()) break;
  }

  const int last = std::max(1, last_content);
  if (cfg.perturbation == PerturbationKind::Near) {
    require(seen.contains("a0") && seen.contains("r_m"), last,
            "near perturbation requires a0 and r_m");
  }
  if (cfg.perturbation == PerturbationKind::Far) {
    require(seen.contains("a0"), last, "far perturbation requires a0");
    require(cfg.far.a0 > 0.0 && cfg.far.a0 < 1.0, last, "far amplitude a0 must lie in (0, 1)");
    require(cfg.z_a.has_value() == cfg.z_b.has_value(), last, "give both z_a and z_b or neither");
    if (cfg.z_a) require(*cfg.z_a < *cfg.z_b, last, "z_a must be below z_b");
    require(cfg.far_radius_a < cfg.far_radius_b, last, "far_radius_a must be below far_radius_b");
  }
  require(cfg.Ntheta >= 2 * cfg.modes + 2, last,
          "modes = " + std::to_string(cfg.modes) + " needs Ntheta >= " +
              std::to_string(2 * cfg.modes + 2));
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

PreparedRun prepare_run(const RunConfig& cfg) {
  const FlowParams params = derive_params(cfg.gamma, cfg.c, cfg.tau0, cfg.R1);
  BuildOptions build;
  build.zmax_radius_fraction = cfg.zmax_radius_fraction;
  InitialSurface surface = build_patches(params, cfg.Nx, cfg.Ny, cfg.Nz, cfg.Ntheta, build);

  RecordOptions record;
  record.modes = cfg.modes;
  record.mismatch_samples = cfg.mismatch_samples;

  if (cfg.perturbation == PerturbationKind::Near) {
    apply_near(surface.cart, cfg.near);
  } else if (cfg.perturbation == PerturbationKind::Far) {
    FarPerturbation far = cfg.far;
    far.z_a = cfg.z_a ? *cfg.z_a : tail_z(cfg.far_radius_a * params.r0, params, surface.z_r1);
    far.z_b = cfg.z_b ? *cfg.z_b : tail_z(cfg.far_radius_b * params.r0, params, surface.z_r1);
    apply_far(surface.cyl, far);
    record.neck_z_lo = far.z_a;
    record.neck_z_hi = far.z_b;
  }

  FlowState state;
  state.mode = PatchMode::Overlap;
  state.cart = surface.cart;
  state.cyl = surface.cyl;

  StopCriteria stop;
  stop.r_min_floor = cfg.r_min_floor ? *cfg.r_min_floor : 1e-3 * params.r0;
  stop.curvature_ceiling = cfg.curvature_ceiling;
  stop.t_max = cfg.t_max;
  stop.max_steps = cfg.max_steps;
  return {params, std::move(surface), std::move(state), stop, record};
}

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, p);
}

void write_snapshot(const FlowState& state, const std::filesystem::path& dir, int index) {
  std::filesystem::create_directories(dir);
  const std::string t = format_double(state.t);
  {
    const auto p = dir / ("cart_" + std::to_string(index) + ".csv");
    auto out = open_out(p);
    out << "t,x,y,z\n";
    const CartesianPatch& c = state.cart;
    for (int i = 0; i < c.nx; ++i)
      for (int k = 0; k < c.ny; ++k)
        out << t << ',' << format_double(c.x(i)) << ',' << format_double(c.y(k)) << ','
            << format_double(c.z(i, k)) << '\n';
    check_written(out, p);
  }
  {
    const auto p = dir / ("cyl_" + std::to_string(index) + ".csv");
    auto out = open_out(p);
    out << "t,z,theta,r\n";
    const CylindricalPatch& c = state.cyl;
    for (int i = 0; i < c.nz; ++i)
      for (int k = 0; k < c.ntheta; ++k)
        out << t << ',' << format_double(c.z(i)) << ',' << format_double(c.theta(k)) << ','
            << format_double(c.r(i, k)) << '\n';
    check_written(out, p);
  }
}

Snapshot read_snapshot(const std::filesystem::path& dir, int index) {
  const auto cp = dir / ("cart_" + std::to_string(index) + ".csv");
  const auto yp = dir / ("cyl_" + std::to_string(index) + ".csv");
  const auto cart_rows = read_csv(cp, "t,x,y,z", 4);
  const auto cyl_rows = read_csv(yp, "t,z,theta,r", 4);
  if (cart_rows.empty() || cyl_rows.empty()) throw std::runtime_error("empty snapshot in " + dir.string());

  const auto ny = static_cast<int>(inner_count(cart_rows, 1));
  const auto nx = static_cast<int>(cart_rows.size() / ny);
  if (static_cast<std::size_t>(nx) * ny != cart_rows.size())
    throw std::runtime_error(cp.string() + ": node table is not a full grid");
  const double L = cart_rows.back()[1] - cart_rows.front()[1];
  Snapshot s{CartesianPatch(L, nx, ny, cart_rows[0][0]), {}};
  for (int i = 0; i < nx; ++i)
    for (int k = 0; k < ny; ++k) s.cart.z(i, k) = cart_rows[static_cast<std::size_t>(i) * ny + k][3];

  const auto nt = static_cast<int>(inner_count(cyl_rows, 1));
  const auto nz = static_cast<int>(cyl_rows.size() / nt);
  if (static_cast<std::size_t>(nz) * nt != cyl_rows.size())
    throw std::runtime_error(yp.string() + ": node table is not a full grid");
  s.cyl = CylindricalPatch(cyl_rows.front()[1], cyl_rows.back()[1], nz, nt, cyl_rows[0][0]);
  for (int i = 0; i < nz; ++i)
    for (int k = 0; k < nt; ++k) s.cyl.r(i, k) = cyl_rows[static_cast<std::size_t>(i) * nt + k][3];
  return s;
}

void write_series(const DiagnosticsSeries& series, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto p = dir / "series.csv";
  auto out = open_out(p);
  out << "t,dt,tip_A,r_min,z_neck,mismatch,a0";
  for (int m = 1; m <= series.modes(); ++m) out << ",a_" << m << ",b_" << m;
  out << '\n';
  for (const SeriesRow& r : series.rows()) {
    out << format_double(r.t) << ',' << format_double(r.dt) << ',' << format_double(r.tip_A) << ','
        << format_double(r.r_min) << ',' << format_double(r.z_neck) << ','
        << format_double(r.mismatch) << ',' << format_double(r.a[0]);
    for (int m = 1; m <= series.modes(); ++m)
      out << ',' << format_double(r.a[m]) << ',' << format_double(r.b[m - 1]);
    out << '\n';
  }
  check_written(out, p);
}

DiagnosticsSeries read_series(const std::filesystem::path& file) {
  std::string header;
  const auto rows = read_csv(file, "", 0, &header);
  const std::string_view fixed = "t,dt,tip_A,r_min,z_neck,mismatch,a0";
  if (header.rfind(fixed, 0) != 0)
    throw std::runtime_error(file.string() + ": unexpected header '" + header + "'");
  const auto cols = static_cast<int>(std::count(header.begin(), header.end(), ',')) + 1;
  if ((cols - 7) % 2 != 0) throw std::runtime_error(file.string() + ": unpaired mode columns");
  DiagnosticsSeries series((cols - 7) / 2);
  for (const auto& v : rows) {
    SeriesRow r{v[0], v[1], v[2], v[3], v[4], v[5], {v[6]}, {}};
    for (int m = 1; m <= series.modes(); ++m) {
      r.a.push_back(v[5 + 2 * m]);
      r.b.push_back(v[6 + 2 * m]);
    }
    series.append(std::move(r));
  }
  return series;
}

}  // namespace mcf
