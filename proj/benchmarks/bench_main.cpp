#include "synth.hpp"

#include "sketchanim/arap.hpp"
#include "sketchanim/pipeline.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace sketchanim;

namespace {

CharacterMesh grid(int nx, int ny) {
  CharacterMesh m;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) m.vertices.emplace_back(10.0 * i, 10.0 * j);
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const int a = j * nx + i;
      m.triangles.push_back({a, a + 1, a + nx + 1});
      m.triangles.push_back({a, a + nx + 1, a + nx});
    }
  m.uvs = m.vertices;
  m.groups.assign(m.triangles.size(), BodyGroup::trunk);
  return m;
}

void BM_ExtractMask(benchmark::State& state) {
  const GrayImage gray = to_grayscale(fixtures::make_figure({}).image);
  for (auto _ : state) benchmark::DoNotOptimize(extract_mask(gray));
}
BENCHMARK(BM_ExtractMask)->Unit(benchmark::kMillisecond);

void BM_ArapFactorise(benchmark::State& state) {
  const CharacterMesh m = grid(40, static_cast<int>(state.range(0)) / 40);
  for (auto _ : state) benchmark::DoNotOptimize(ArapSolver(m, {0, 39, 500, 520}));
}
BENCHMARK(BM_ArapFactorise)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_ArapSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CharacterMesh m = grid(40, n / 40);
  const std::vector<int> handles{0, 39, n - 40, n - 1, n / 2};
  const ArapSolver solver(m, handles);
  std::vector<Point2> targets;
  for (int h : handles) targets.push_back(m.vertices[h]);
  int f = 0;
  for (auto _ : state) {
    targets[4] = m.vertices[handles[4]] + 20 * Point2(std::cos(0.1 * f), std::sin(0.1 * f));
    ++f;
    benchmark::DoNotOptimize(solver.solve(targets));
  }
}
BENCHMARK(BM_ArapSolve)->Arg(1000)->Arg(4000)->Unit(benchmark::kMicrosecond);

void BM_AnimateWalk(benchmark::State& state) {
  const auto fig = fixtures::make_figure({});
  Character ch;
  ch.mask = extract_mask(to_grayscale(fig.image));
  ch.texture = fig.image;
  ch.joints = fig.joints;
  const MotionClip clip = fixtures::walk(60);
  for (auto _ : state) benchmark::DoNotOptimize(animate(ch, clip, {}));
}
BENCHMARK(BM_AnimateWalk)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
