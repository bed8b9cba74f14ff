#include <benchmark/benchmark.h>

#include <vector>

#include "gpc/grid.hpp"
#include "gpc/minimizer.hpp"
#include "gpc/potential.hpp"

namespace {

gpc::PotentialSpec coulomb() { return gpc::PotentialSpec(gpc::ZeroBackground{}, {{{0, 0}, 1.0, -1.0}}); }

void BM_NegLaplacian(benchmark::State& state) {
  const gpc::Grid2D g(8.0, static_cast<int>(state.range(0)));
  const gpc::Field2D u = gpc::initial_field(g, gpc::GaussianInit{});
  std::vector<double> out(g.size());
  for (auto _ : state) {
    gpc::neg_laplacian(g, u.data(), gpc::Stencil::fourth_order, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_NegLaplacian)->Arg(128)->Arg(256)->Arg(512);

void BM_SamplePotential(benchmark::State& state) {
  const gpc::Grid2D g(8.0, static_cast<int>(state.range(0)));
  const gpc::PotentialSpec spec = coulomb();
  for (auto _ : state) benchmark::DoNotOptimize(gpc::sample_potential(spec, g));
}
BENCHMARK(BM_SamplePotential)->Arg(128)->Arg(256);

// A fixed number of gradient-flow steps; the cost per step is the quantity of interest.
void BM_MinimizeSteps(benchmark::State& state) {
  const gpc::Grid2D g(8.0, static_cast<int>(state.range(0)));
  const gpc::PotentialSpec spec = coulomb();
  const auto v = gpc::sample_potential(spec, g);
  gpc::SolveOptions o;
  o.max_iters = 20;
  o.residual_tol = 1e-300;
  o.record_history = false;
  for (auto _ : state) benchmark::DoNotOptimize(gpc::minimize_sampled(g, v, 5.0, o).energy.total);
  state.SetItemsProcessed(state.iterations() * o.max_iters);
}
BENCHMARK(BM_MinimizeSteps)->Arg(130)->Arg(258);

}  // namespace

BENCHMARK_MAIN();
