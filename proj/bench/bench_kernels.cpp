#include <benchmark/benchmark.h>

#include <random>

#include "envelope/kernels.hpp"
#include "envelope/system_model.hpp"

using namespace envelope;

namespace {

std::vector<cplx> random_values(std::size_t count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(count);
  for (auto& c : v) c = {g(rng), g(rng)};
  return v;
}

const SystemSpec& kg() {
  static const SystemSpec s = [] {
    RMat M(2, 2);
    M << 0, -1, 1, 0;
    return builtin_klein_gordon(1.0, M);
  }();
  return s;
}

void BM_accumulate(benchmark::State& state, Exec exec) {
  const int points = static_cast<int>(state.range(0));
  const auto a = random_values(2 * points, 1), b = random_values(2 * points, 2);
  const std::vector<const cplx*> src{a.data(), b.data()};
  const std::vector<TripleTerm> terms{{{0, 0, 0}, {false, false, true}, 3.0},
                                      {{0, 1, 1}, {false, false, true}, 6.0},
                                      {{0, 0, 1}, {true, true, false}, 3.0}};
  std::vector<cplx> out(2 * points);
  for (auto _ : state) {
    kernels::accumulate_trilinear(kg().T, 2, points, src, terms, out.data(), exec);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * points);
}

void BM_rk4(benchmark::State& state, Exec exec) {
  const int points = static_cast<int>(state.range(0));
  auto u = random_values(2 * points, 3);
  for (auto _ : state) {
    kernels::rk4_pointwise(kg().T, 2, points, 1e-3, 0.1, u.data(), exec);
    benchmark::DoNotOptimize(u.data());
  }
  state.SetItemsProcessed(state.iterations() * points);
}

void BM_per_mode(benchmark::State& state, Exec exec) {
  const int modes = static_cast<int>(state.range(0));
  const auto mats = random_values(4 * modes, 4);
  auto v = random_values(2 * modes, 5);
  for (auto _ : state) {
    kernels::apply_per_mode(mats, 2, v, exec);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * modes);
}

void BM_phases(benchmark::State& state, Exec exec) {
  const int modes = static_cast<int>(state.range(0));
  std::vector<double> lambda(2 * modes);
  for (int i = 0; i < 2 * modes; ++i) lambda[i] = 1e-3 * i;
  auto v = random_values(2 * modes, 6);
  for (auto _ : state) {
    kernels::apply_phases(lambda, 0.37, v, false, exec);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * modes);
}

}  // namespace

BENCHMARK_CAPTURE(BM_accumulate, serial, Exec::serial)->Arg(1024)->Arg(32768);
BENCHMARK_CAPTURE(BM_accumulate, omp, Exec::parallel)->Arg(1024)->Arg(32768);
BENCHMARK_CAPTURE(BM_rk4, serial, Exec::serial)->Arg(1024)->Arg(32768);
BENCHMARK_CAPTURE(BM_rk4, omp, Exec::parallel)->Arg(1024)->Arg(32768);
BENCHMARK_CAPTURE(BM_per_mode, serial, Exec::serial)->Arg(16384);
BENCHMARK_CAPTURE(BM_per_mode, omp, Exec::parallel)->Arg(16384);
BENCHMARK_CAPTURE(BM_phases, serial, Exec::serial)->Arg(16384);
BENCHMARK_CAPTURE(BM_phases, omp, Exec::parallel)->Arg(16384);

BENCHMARK_MAIN();
