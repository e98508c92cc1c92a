#include <benchmark/benchmark.h>

#include <random>

#include "shiftlab/equivalence/intertwine.hpp"
#include "shiftlab/exactnum/kernels.hpp"
#include "shiftlab/models/fixtures.hpp"

using namespace shiftlab;
using shiftlab::exactnum::FinMatrix;
using shiftlab::exactnum::Mode;
using shiftlab::exactnum::Scalar;

namespace {

FinMatrix random_matrix(std::size_t n, Mode mode, unsigned seed) {
  std::mt19937 rng(seed);
  FinMatrix m(n, n, mode);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const long num = static_cast<long>(rng() % 9) - 4;
      const long den = 1 + rng() % 5;
      const Scalar s = Scalar::rational(num, den);
      m(i, j) = mode == Mode::Float ? s.to_float() : s;
    }
  }
  return m;
}

template <FinMatrix (*Kernel)(const FinMatrix&, const FinMatrix&)>
void matmul(benchmark::State& state, Mode mode) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FinMatrix a = random_matrix(n, mode, 1), b = random_matrix(n, mode, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, b));
}

void matmul_exact_serial(benchmark::State& s) { matmul<exactnum::kernels::matmul_serial>(s, Mode::Exact); }
void matmul_exact_parallel(benchmark::State& s) { matmul<exactnum::kernels::matmul_parallel>(s, Mode::Exact); }
void matmul_float_serial(benchmark::State& s) { matmul<exactnum::kernels::matmul_serial>(s, Mode::Float); }
void matmul_float_parallel(benchmark::State& s) { matmul<exactnum::kernels::matmul_parallel>(s, Mode::Float); }

template <bool Parallel>
void intertwine(benchmark::State& state) {
  const auto spec = models::ModelSpec::x2(2, 1, {Scalar::rational(3, 4)});
  const auto x = models::build_model(spec);
  const auto u = equivalence::BasisRuleUnitary::identity(x.shape_in);
  const auto depth = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Parallel ? equivalence::verify_intertwine(u, x, x, depth) : equivalence::verify_intertwine_serial(u, x, x, depth));
  }
}

}  // namespace

BENCHMARK(matmul_exact_serial)->Arg(16)->Arg(32)->Arg(48);
BENCHMARK(matmul_exact_parallel)->Arg(16)->Arg(32)->Arg(48);
BENCHMARK(matmul_float_serial)->Arg(64)->Arg(128);
BENCHMARK(matmul_float_parallel)->Arg(64)->Arg(128);
BENCHMARK(intertwine<false>)->Arg(32)->Arg(64);
BENCHMARK(intertwine<true>)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
