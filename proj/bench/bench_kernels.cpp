#include <benchmark/benchmark.h>

#include <cmath>

#include "mcf/kernels.hpp"

namespace {

mcf::CartesianPatch make_cart(int n) {
  mcf::CartesianPatch p(0.3, n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) p.z(i, k) = std::hypot(p.x(i), p.y(k)) * 2.0 + 0.1 * p.x(i) * p.y(k);
  return p;
}

mcf::CylindricalPatch make_cyl(int nz, int nt) {
  mcf::CylindricalPatch p(0.0, 2.0, nz, nt);
  for (int i = 0; i < nz; ++i)
    for (int k = 0; k < nt; ++k)
      p.r(i, k) = 0.15 + 0.02 * std::sin(p.z(i)) * (1.0 + 0.25 * std::cos(2.0 * p.theta(k)));
  return p;
}

void BM_CartesianSerial(benchmark::State& state) {
  const auto p = make_cart(static_cast<int>(state.range(0)));
  mcf::Grid2D out = p.z;
  for (auto _ : state) {
    mcf::kernels::advance_cartesian_serial(p, 1e-7, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_CartesianParallel(benchmark::State& state) {
  const auto p = make_cart(static_cast<int>(state.range(0)));
  mcf::Grid2D out = p.z;
  for (auto _ : state) {
    mcf::kernels::advance_cartesian_parallel(p, 1e-7, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
  state.counters["threads"] = mcf::kernels::thread_count();
}

void BM_CylindricalSerial(benchmark::State& state) {
  const auto p = make_cyl(static_cast<int>(state.range(0)), 64);
  mcf::Grid2D out = p.r;
  for (auto _ : state) {
    mcf::kernels::advance_cylindrical_serial(p, 1e-7, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 64);
}

void BM_CylindricalParallel(benchmark::State& state) {
  const auto p = make_cyl(static_cast<int>(state.range(0)), 64);
  mcf::Grid2D out = p.r;
  for (auto _ : state) {
    mcf::kernels::advance_cylindrical_parallel(p, 1e-7, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 64);
  state.counters["threads"] = mcf::kernels::thread_count();
}

}  // namespace

BENCHMARK(BM_CartesianSerial)->Arg(65)->Arg(129)->Arg(257);
BENCHMARK(BM_CartesianParallel)->Arg(65)->Arg(129)->Arg(257);
BENCHMARK(BM_CylindricalSerial)->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_CylindricalParallel)->Arg(128)->Arg(256)->Arg(512);

BENCHMARK_MAIN();
