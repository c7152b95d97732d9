#include <benchmark/benchmark.h>

#include "roadnet/fem.hpp"
#include "roadnet/graphspace.hpp"
#include "roadnet/mesh.hpp"
#include "roadnet/pattern_io.hpp"
#include "roadnet/tensor.hpp"

using namespace roadnet;

namespace {

TorusPattern fixture(const std::string& name) {
  return load_pattern(std::string(ROADNET_FIXTURE_DIR) + "/" + name + ".json");
}

void bm_unfold(benchmark::State& state) {
  auto pattern = fixture("five_arcs");
  double h = 1.0 / (double)state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(unfold(pattern, {0.13, 0.41}, h));
}
BENCHMARK(bm_unfold)->Arg(50)->Arg(100);

void bm_build_mesh(benchmark::State& state) {
  auto pattern = fixture("circle");
  double h = 1.0 / (double)state.range(0);
  auto unfolded = unfold(pattern, {0.0, 0.0}, h);
  for (auto _ : state) {
    auto mesh = build_mesh(unfolded, h);
    benchmark::DoNotOptimize(mesh.n_triangles());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_build_mesh)->Arg(25)->Arg(50)->Arg(100)->Complexity();

void bm_build_strip_mesh(benchmark::State& state) {
  auto pattern = fixture("circle");
  double delta = 1.0 / (double)state.range(0);
  double h = std::min(0.04, delta / 2.0);
  auto unfolded = unfold(pattern, {0.0, 0.0}, h);
  for (auto _ : state) {
    auto mesh = build_mesh(unfolded, 0.04, delta);
    benchmark::DoNotOptimize(mesh.n_triangles());
  }
}
BENCHMARK(bm_build_strip_mesh)->Arg(25)->Arg(50);

void bm_assemble(benchmark::State& state) {
  auto pattern = fixture("circle");
  double h = 1.0 / (double)state.range(0);
  auto mesh = build_mesh(unfold(pattern, {0.0, 0.0}, h), h);
  for (auto _ : state) {
    auto sys = assemble_effective(mesh, 1.0);
    benchmark::DoNotOptimize(sys.dofs.n_dofs);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_assemble)->Arg(25)->Arg(50)->Arg(100)->Complexity();

void bm_solve_corrector(benchmark::State& state) {
  auto pattern = fixture("circle");
  double h = 1.0 / (double)state.range(0);
  auto mesh = build_mesh(unfold(pattern, {0.0, 0.0}, h), h);
  auto sys = assemble_effective(mesh, 1.0);
  for (auto _ : state) {
    auto w = solve_corrector(sys, 1);
    benchmark::DoNotOptimize(w.iterations);
  }
}
BENCHMARK(bm_solve_corrector)->Arg(25)->Arg(50)->Arg(100);

void bm_effective_tensor(benchmark::State& state) {
  auto pattern = fixture("circle_segment");
  double h = 1.0 / (double)state.range(0);
  auto mesh = build_mesh(unfold(pattern, {0.0, 0.0}, h), h);
  for (auto _ : state) {
    auto r = effective_tensor(mesh, 1.0);
    benchmark::DoNotOptimize(r.sigma.s11);
  }
}
BENCHMARK(bm_effective_tensor)->Arg(25)->Arg(50);

void bm_compute_d(benchmark::State& state) {
  auto pattern = fixture("circle_segment");
  int grid_n = (int)state.range(0);
  for (auto _ : state) {
    auto r = compute_d(pattern, grid_n, 0.02);
    benchmark::DoNotOptimize(r.d);
  }
}
BENCHMARK(bm_compute_d)->Arg(4)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
