#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "mcf/errors.hpp"
#include "mcf/io.hpp"

using namespace mcf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mcf_io_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("empty config gives the documented defaults") {
  const RunConfig c = parse_config("");
  CHECK(c.gamma == 0.75);
  CHECK(c.c == 1.0);
  CHECK(c.tau0 == 4.0);
  CHECK(c.safety == 0.1);
  CHECK(c.Ntheta == 64);
  CHECK(c.perturbation == PerturbationKind::None);
  CHECK_FALSE(c.R1.has_value());
}

TEST_CASE("config parses keys, comments and blank lines") {
  const RunConfig c = parse_config(
      "# run\n"
      "gamma = 0.75\n"
      "tau0 = 4   # standard\n"
      "\n"
      "Nz=96\n"
      "perturbation = near\n"
      "a0 = 0.5\n"
      "a1 = 20\n"
      "r_m = 0.02\n"
      "output_dir = runs/near\n");
  CHECK(c.gamma == 0.75);
  CHECK(c.tau0 == 4.0);
  CHECK(c.Nz == 96);
  CHECK(c.perturbation == PerturbationKind::Near);
  CHECK(c.near.a1 == 20.0);
  CHECK(c.near.r_m == 0.02);
  CHECK(c.output_dir == "runs/near");
}

TEST_CASE("config errors carry the offending line") {
  auto line_of = [](const char* text) {
    try {
      parse_config(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("gamma = 0.75\nbogus = 1\n") == 2);
  CHECK(line_of("\n\nNtheta = 63\n") == 3);
  CHECK(line_of("safety = 2\n") == 1);
  CHECK(line_of("gamma = 0.5\n") == 1);
  CHECK(line_of("gamma = abc\n") == 1);
  CHECK(line_of("gamma 0.75\n") == 1);
  CHECK(line_of("Nx = 9\nNx = 11\n") == 2);
  CHECK(line_of("perturbation = near\na0 = 0.1\n") == 2);
}

TEST_CASE("odd far modes are rejected at parse time") {
  try {
    parse_config("perturbation = far\nn = 3\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("even") != std::string::npos);
  }
}

TEST_CASE("far config derives its support interval from the tail") {
  const RunConfig c = parse_config("perturbation = far\na0 = 0.1\nn = 4\n");
  const PreparedRun r = prepare_run(c);
  CHECK(r.record.neck_z_lo == doctest::Approx(tail_z(0.95 * r.params.r0, r.params, r.surface.z_r1)));
  CHECK(r.record.neck_z_hi == doctest::Approx(tail_z(0.97 * r.params.r0, r.params, r.surface.z_r1)));
  CHECK(r.stop.r_min_floor == doctest::Approx(1e-3 * r.params.r0));
}

TEST_CASE("snapshot files have the documented layout") {
  FlowState s;
  s.cart = CartesianPatch(0.4, 5, 5, 0.25);
  s.cyl = CylindricalPatch(0.1, 0.9, 6, 4, 0.25);
  s.t = 0.25;
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < 5; ++k) s.cart.z(i, k) = 0.1 * i + 0.01 * k + 1.0 / 3.0;
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 4; ++k) s.cyl.r(i, k) = 0.2 + std::sqrt(2.0) * i + k / 7.0;
  const fs::path dir = scratch("snap");
  write_snapshot(s, dir, 3);

  const auto cart = lines_of(dir / "cart_3.csv");
  REQUIRE(cart.size() == 1 + 25);
  CHECK(cart[0] == "t,x,y,z");
  const auto cyl = lines_of(dir / "cyl_3.csv");
  REQUIRE(cyl.size() == 1 + 24);
  CHECK(cyl[0] == "t,z,theta,r");

  const Snapshot back = read_snapshot(dir, 3);
  CHECK(back.cart.z == s.cart.z);
  CHECK(back.cyl.r == s.cyl.r);
  CHECK(back.cart.t == 0.25);
  CHECK(back.cyl.z_min == s.cyl.z_min);
  CHECK(back.cyl.z_max == s.cyl.z_max);
  CHECK(back.cart.L == doctest::Approx(s.cart.L).epsilon(1e-15));

  // Row order: i outer, k inner.
  double z_prev = -1e300, th_prev = -1.0;
  for (std::size_t j = 1; j < cyl.size(); ++j) {
    std::istringstream row(cyl[j]);
    std::string t, z, th;
    std::getline(row, t, ',');
    std::getline(row, z, ',');
    std::getline(row, th, ',');
    const double zv = std::stod(z), tv = std::stod(th);
    if (zv == z_prev) {
      CHECK(tv > th_prev);
    } else {
      CHECK(zv > z_prev);
      CHECK(tv == 0.0);
    }
    z_prev = zv;
    th_prev = tv;
  }
  fs::remove_all(dir);
}

TEST_CASE("seventeen digits round trip every double") {
  for (double v : {1.0 / 3.0, 1e-300, -2.5e17, 0.1 + 0.2, 6.02214076e23, 5e-324}) {
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
}

TEST_CASE("series file layout and round trip") {
  const fs::path dir = scratch("series");
  DiagnosticsSeries empty(3);
  write_series(empty, dir);
  auto lines = lines_of(dir / "series.csv");
  REQUIRE(lines.size() == 1);
  CHECK(lines[0] == "t,dt,tip_A,r_min,z_neck,mismatch,a0,a_1,b_1,a_2,b_2,a_3,b_3");

  DiagnosticsSeries s(2);
  for (int j = 0; j < 4; ++j)
    s.append(SeriesRow{j * 0.1, 1e-3 / 3, 1.0 + j, 0.2 - j * 0.01, 0.5, 1e-7, {0.2, 1e-3, 1e-4}, {2e-3, -1e-5}});
  write_series(s, dir);
  lines = lines_of(dir / "series.csv");
  REQUIRE(lines.size() == 5);
  const auto commas = std::count(lines[0].begin(), lines[0].end(), ',');
  CHECK(commas + 1 - 6 == 2 * s.modes() + 1);  // columns after the six scalars
  const DiagnosticsSeries back = read_series(dir / "series.csv");
  REQUIRE(back.size() == 4);
  CHECK(back.modes() == 2);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(back.rows()[j].t == s.rows()[j].t);
    CHECK(back.rows()[j].dt == s.rows()[j].dt);
    CHECK(back.rows()[j].a == s.rows()[j].a);
    CHECK(back.rows()[j].b == s.rows()[j].b);
    if (j > 0) CHECK(back.rows()[j].t > back.rows()[j - 1].t);
  }
  fs::remove_all(dir);
}

TEST_CASE("io failures name the path") {
  try {
    read_series("/nonexistent/dir/series.csv");
    FAIL("expected failure");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/series.csv") != std::string::npos);
  }
}
