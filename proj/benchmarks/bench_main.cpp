#include <benchmark/benchmark.h>

#include <cmath>

#include "splinecolloc/abd.hpp"
#include "splinecolloc/osc1d.hpp"
#include "splinecolloc/osc2d.hpp"
#include "splinecolloc/surrogate/mpnn.hpp"

using namespace splinecolloc;

static void BM_AbdFactorize(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto s = abd::scaling_structure(n, {});
  const auto m = abd::random_abd(s, 1, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(abd::factorize(m));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(s.dimension()));
}
BENCHMARK(BM_AbdFactorize)->RangeMultiplier(2)->Range(256, 4096)->Complexity();

static void BM_AbdSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto s = abd::scaling_structure(n, {});
  const auto fac = abd::factorize(abd::random_abd(s, 1, 2.0));
  const Eigen::VectorXd f = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(s.dimension()));
  for (auto _ : state) benchmark::DoNotOptimize(fac.solve(f));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(s.dimension()));
}
BENCHMARK(BM_AbdSolve)->RangeMultiplier(2)->Range(256, 4096)->Complexity();

static void BM_Osc1dOde(benchmark::State& state) {
  const auto cells = static_cast<std::size_t>(state.range(0));
  osc::OdeSpec spec{1.0, 0.0, 1.0, [](double x) { return std::sin(x); }, 0.0, 0.0};
  const auto p = osc::Osc1dProblem::ode(basis::PartitionGrid::uniform(0, 1, cells, 4), spec);
  for (auto _ : state) benchmark::DoNotOptimize(osc::solve_osc1d(p));
}
BENCHMARK(BM_Osc1dOde)->Arg(16)->Arg(128)->Arg(1024);

static void BM_SurfaceFit(benchmark::State& state) {
  const auto cells = static_cast<std::size_t>(state.range(0));
  std::vector<double> bp(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) bp[i] = double(i) / double(cells);
  const auto layout = osc::PointLayout::tensor(bp, bp);
  Eigen::VectorXd v(static_cast<Eigen::Index>(layout.points.size()));
  for (Eigen::Index k = 0; k < v.size(); ++k)
    v(k) = std::sin(3 * layout.points[k].x()) * std::cos(2 * layout.points[k].y());
  for (auto _ : state) {
    const osc::Surface2dSystem sys(layout);
    benchmark::DoNotOptimize(sys.fit(v));
  }
}
BENCHMARK(BM_SurfaceFit)->Arg(5)->Arg(16)->Arg(32);

static void BM_MpnnStep(benchmark::State& state) {
  std::vector<double> bp{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  const auto g = surrogate::grid_graph(osc::PointLayout::tensor(bp, bp));
  const auto p = surrogate::MpnnParams::glorot({}, 0);
  const surrogate::Matrix s = surrogate::Matrix::Ones(static_cast<Eigen::Index>(g.node_count()), 1);
  for (auto _ : state) benchmark::DoNotOptimize(surrogate::mpnn_step(p, g, s));
}
BENCHMARK(BM_MpnnStep);

BENCHMARK_MAIN();
