#include <benchmark/benchmark.h>

#include "ionpred/embed.hpp"
#include "ionpred/mlp.hpp"
#include "ionpred/ridge.hpp"
#include "ionpred/rng.hpp"
#include "ionpred/synth.hpp"
#include "ionpred/training.hpp"

using namespace ionpred;

namespace {

numerics::DenseMatrix gaussian(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  numerics::DenseMatrix m(rows, cols);
  for (double& v : m.data) v = rng.normal();
  return m;
}

void BM_RidgeSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  const auto x = gaussian(n, d, 1);
  const auto h = gaussian(n, 8, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(numerics::ridge_solve(x, h, 1e-5));
  }
}
BENCHMARK(BM_RidgeSolve)->Args({64, 34})->Args({256, 34})->Args({256, 128});

void BM_MlpForward(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  Rng rng(3);
  const numerics::Mlp m = numerics::make_mlp({8, width, width, width, 1}, rng);
  std::vector<double> v(8);
  for (double& x : v) x = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(numerics::mlp_forward(m, v));
  }
}
BENCHMARK(BM_MlpForward)->Arg(64)->Arg(256)->Arg(1024);

void BM_MlpBackward(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  Rng rng(4);
  const numerics::Mlp m = numerics::make_mlp({8, width, width, width, 1}, rng);
  std::vector<double> v(8);
  for (double& x : v) x = rng.normal();
  const numerics::MlpTrace trace = numerics::mlp_forward_trace(m, v);
  numerics::MlpGrads grads = numerics::make_zero_grads(m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(numerics::mlp_backward(m, trace, 1.0, grads));
  }
}
BENCHMARK(BM_MlpBackward)->Arg(64)->Arg(256);

void BM_SimulateTrajectory(benchmark::State& state) {
  synth::MaterialSpec spec;
  spec.n_atoms = 32;
  spec.n_target_ions = 8;
  spec.barrier_spread = 0.8;
  spec.attempt_rate = 2.0;
  spec.seed = 5;
  const Structure st = synth::gen_material(spec);
  const int frames = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(synth::simulate_trajectory(st, spec, 0.9, frames, 0.1, 7));
  }
}
BENCHMARK(BM_SimulateTrajectory)->Arg(512)->Arg(4096);

void BM_TrajectoryEmbedding(benchmark::State& state) {
  synth::MaterialSpec spec;
  spec.n_atoms = 32;
  spec.n_target_ions = 8;
  spec.barrier_spread = 0.8;
  spec.attempt_rate = 2.0;
  spec.seed = 6;
  const Structure st = synth::gen_material(spec);
  const int frames = static_cast<int>(state.range(0));
  const Trajectory tr = synth::simulate_trajectory(st, spec, 0.9, frames, 0.1, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(embed::trajectory_embedding(tr, st, synth::kTargetSpecies, 16));
  }
}
BENCHMARK(BM_TrajectoryEmbedding)->Arg(512)->Arg(4096);

void BM_BuildX(benchmark::State& state) {
  synth::MaterialSpec spec;
  spec.n_atoms = static_cast<int>(state.range(0));
  spec.n_target_ions = spec.n_atoms / 4;
  spec.barrier_spread = 0.8;
  spec.seed = 9;
  const Structure st = synth::gen_material(spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(embed::build_x(st, 0.9, 1.1, synth::kTargetSpecies));
  }
}
BENCHMARK(BM_BuildX)->Arg(32)->Arg(256);

void BM_PredictorInference(benchmark::State& state) {
  Rng rng(10);
  const training::Predictor f = training::make_predictor(34, 8, 64, 11);
  std::vector<double> x(34);
  for (double& v : x) v = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(training::predict(f, x));
  }
}
BENCHMARK(BM_PredictorInference);

}  // namespace

BENCHMARK_MAIN();
