// Serial reference vs OpenMP for the three parallel kernels.
#include <benchmark/benchmark.h>

#include <limits>
#include <vector>

#include "ecovid/chroma.hpp"
#include "ecovid/kernels.hpp"
#include "ecovid/learners/forest.hpp"
#include "ecovid/rng.hpp"

namespace {

using namespace ecovid;

std::vector<std::vector<std::uint8_t>> make_frames(std::size_t frames, std::size_t pixels) {
  Rng rng(7);
  std::vector<std::vector<std::uint8_t>> out(frames, std::vector<std::uint8_t>(pixels * 3));
  for (auto& f : out)
    for (auto& b : f) b = static_cast<std::uint8_t>(rng.uniform_index(256));
  return out;
}

std::vector<chroma::Point3> make_points(std::size_t n) {
  Rng rng(11);
  std::vector<chroma::Point3> pts(n);
  for (auto& p : pts) p = {rng.uniform(0, 255), rng.uniform(0, 255), rng.uniform(0, 255)};
  return pts;
}

void BM_FrameSumsSerial(benchmark::State& state) {
  const auto frames = make_frames(static_cast<std::size_t>(state.range(0)), 160 * 90);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::frame_sums(frames));
}

void BM_FrameSumsOmp(benchmark::State& state) {
  const auto frames = make_frames(static_cast<std::size_t>(state.range(0)), 160 * 90);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::frame_sums(frames));
}

template <bool Parallel>
void BM_Assign(benchmark::State& state) {
  const auto points = make_points(static_cast<std::size_t>(state.range(0)));
  const auto centroids = make_points(8);
  std::vector<std::size_t> labels(points.size());
  for (auto _ : state) {
    std::fill(labels.begin(), labels.end(), std::numeric_limits<std::size_t>::max());
    if constexpr (Parallel) benchmark::DoNotOptimize(kernels::omp::assign(points, centroids, labels));
    else benchmark::DoNotOptimize(kernels::serial::assign(points, centroids, labels));
  }
}

template <bool Parallel>
void BM_Forest(benchmark::State& state) {
  Rng rng(3);
  const Eigen::Index n = 200, d = 12;
  learn::Matrix X(n, d);
  learn::Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) X(i, j) = rng.normal();
    y(i) = X(i, 0) - 2 * X(i, 3) + 0.1 * rng.normal();
  }
  learn::ForestParams p;
  p.n_trees = static_cast<std::size_t>(state.range(0));
  p.parallel = Parallel;
  for (auto _ : state) benchmark::DoNotOptimize(learn::forest_fit(X, y, p));
}

}  // namespace

BENCHMARK(BM_FrameSumsSerial)->Arg(16)->Arg(64);
BENCHMARK(BM_FrameSumsOmp)->Arg(16)->Arg(64);
BENCHMARK(BM_Assign<false>)->Name("BM_AssignSerial")->Arg(20000)->Arg(200000);
BENCHMARK(BM_Assign<true>)->Name("BM_AssignOmp")->Arg(20000)->Arg(200000);
BENCHMARK(BM_Forest<false>)->Name("BM_ForestSerial")->Arg(100);
BENCHMARK(BM_Forest<true>)->Name("BM_ForestOmp")->Arg(100);

BENCHMARK_MAIN();
