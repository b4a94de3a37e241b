#include <cmath>
#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "pds/filters.hpp"
#include "pds/grid.hpp"
#include "pds/precondition.hpp"
#include "pds/rng.hpp"
#include "pds/sampler.hpp"
#include "pds/spectral.hpp"
#include "pds/targets.hpp"

namespace {

pds::GridShape square(std::int64_t side) {
  const int s = static_cast<int>(side);
  return pds::GridShape{1, s, s};
}

// Deterministic strictly-positive space filter; the values are irrelevant to
// the cost being measured, only the shape is.
pds::Field wavy_space_filter(const pds::GridShape& shape) {
  pds::Field a(shape, 1.0);
  for (std::int64_t i = 0; i < a.size(); ++i) {
    a[i] = 1.0 + 0.25 * std::sin(0.7 * static_cast<double>(i));
  }
  return a;
}

pds::Preconditioner make_preconditioner(const pds::GridShape& shape) {
  const pds::Field r = pds::build_parametric_r(
      shape, pds::ParametricFilterSpec{0.2 * shape.height, 1.6});
  return pds::Preconditioner::make(wavy_space_filter(shape), r);
}

void BM_Fft2(benchmark::State& state) {
  pds::Rng rng(1);
  const pds::Field x = rng.normal_field(square(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pds::fft2(x));
  }
  state.SetItemsProcessed(state.iterations() * x.size());
}
BENCHMARK(BM_Fft2)->Arg(16)->Arg(32)->Arg(96)->Arg(256);

void BM_ApplyM(benchmark::State& state) {
  const pds::GridShape shape = square(state.range(0));
  const pds::Preconditioner p = make_preconditioner(shape);
  pds::Rng rng(2);
  const pds::Field x = rng.normal_field(shape);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pds::apply_m(p, x));
  }
  state.SetItemsProcessed(state.iterations() * x.size());
}
BENCHMARK(BM_ApplyM)->Arg(32)->Arg(96)->Arg(256);

void BM_ApplyMInverse(benchmark::State& state) {
  const pds::GridShape shape = square(state.range(0));
  const pds::Preconditioner p = make_preconditioner(shape);
  pds::Rng rng(3);
  const pds::Field x = rng.normal_field(shape);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pds::apply_m_inverse(p, x));
  }
  state.SetItemsProcessed(state.iterations() * x.size());
}
BENCHMARK(BM_ApplyMInverse)->Arg(32)->Arg(96)->Arg(256);

void BM_DriftPrecondition(benchmark::State& state) {
  const pds::GridShape shape = square(state.range(0));
  const pds::Preconditioner p = make_preconditioner(shape);
  pds::Rng rng(4);
  const pds::Field x = rng.normal_field(shape);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pds::apply_drift_precondition(p, x));
  }
  state.SetItemsProcessed(state.iterations() * x.size());
}
BENCHMARK(BM_DriftPrecondition)->Arg(32)->Arg(96)->Arg(256);

void BM_GrfScore(benchmark::State& state) {
  const pds::GridShape shape = square(state.range(0));
  const pds::GrfTarget grf = pds::GrfTarget::radial_power(shape, 1.0, 1.0);
  pds::Rng rng(5);
  const pds::Field x = grf.sample(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(grf.score(x));
  }
  state.SetItemsProcessed(state.iterations() * x.size());
}
BENCHMARK(BM_GrfScore)->Arg(32)->Arg(96)->Arg(256);

void BM_VanillaStep(benchmark::State& state) {
  const pds::GridShape shape = square(state.range(0));
  const pds::ScoreTarget target = pds::GrfTarget::radial_power(shape, 1.0, 1.0);
  pds::Rng rng(6);
  pds::Field x = rng.normal_field(shape);
  for (auto _ : state) {
    x = pds::vanilla_step(x, target, 0.05, rng);
    benchmark::DoNotOptimize(x);
  }
  state.SetItemsProcessed(state.iterations() * x.size());
}
BENCHMARK(BM_VanillaStep)->Arg(32)->Arg(96)->Arg(256);

void BM_PdsStep(benchmark::State& state) {
  const pds::GridShape shape = square(state.range(0));
  const pds::ScoreTarget target = pds::GrfTarget::radial_power(shape, 1.0, 1.0);
  const pds::Preconditioner p = make_preconditioner(shape);
  const pds::Solenoidal sol{pds::shift_diff(1, 0), 1.0};
  pds::Rng rng(7);
  pds::Field x = rng.normal_field(shape);
  for (auto _ : state) {
    x = pds::pds_step(x, target, 0.05, &p, &sol, rng, false);
    benchmark::DoNotOptimize(x);
  }
  state.SetItemsProcessed(state.iterations() * x.size());
}
BENCHMARK(BM_PdsStep)->Arg(32)->Arg(96)->Arg(256);

void BM_StatisticalFilterBuild(benchmark::State& state) {
  const pds::GridShape shape = square(state.range(0));
  const pds::GrfTarget grf = pds::GrfTarget::radial_power(shape, 1.0, 1.0);
  pds::Rng rng(8);
  std::vector<pds::Field> draws;
  draws.reserve(64);
  for (int i = 0; i < 64; ++i) draws.push_back(grf.sample(rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        pds::build_statistical_r(draws, pds::StatisticalFilterSpec{5.0}));
  }
}
BENCHMARK(BM_StatisticalFilterBuild)->Arg(32)->Arg(96);

void BM_GaussianSample(benchmark::State& state) {
  const pds::GridShape shape = square(state.range(0));
  const pds::GaussianTarget g = pds::GaussianTarget::standard(shape);
  pds::Rng rng(9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.sample(rng));
  }
}
BENCHMARK(BM_GaussianSample)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
