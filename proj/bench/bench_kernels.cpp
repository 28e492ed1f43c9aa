// Serial vs OpenMP kernels on generated wide instances.
//
//   ./bench_kernels --benchmark_filter=Gather
//   OMP_NUM_THREADS=4 ./bench_kernels

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "icbpg/dataset.hpp"
#include "icbpg/kernels.hpp"
#include "icbpg/rng.hpp"
#include "icbpg/theory.hpp"

namespace {

using namespace icbpg;
namespace k = icbpg::kernels;

struct Fixture {
  SparseMatrix a;
  SparseRowMatrix rows;
  Vector v;  // length m
  Vector x;  // length n
};

const Fixture& fixture(Index N) {
  static std::map<Index, std::unique_ptr<Fixture>> cache;
  auto& slot = cache[N];
  if (!slot) {
    DatasetSpec spec;
    spec.shape = Shape::Wide;
    spec.N = N;
    spec.seed = 3;
    Dataset d = generate_dataset(spec);
    slot = std::make_unique<Fixture>();
    slot->a = std::move(d.A);
    slot->rows = slot->a;
    CounterRng rng(11);
    slot->v.resize(slot->a.rows());
    slot->x.resize(slot->a.cols());
    for (auto& e : slot->v) e = rng.normal();
    for (auto& e : slot->x) e = rng.normal();
  }
  return *slot;
}

template <k::Execution E>
void BM_Gather(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  const k::ColumnRange all{&f.a, 0, f.a.cols()};
  Vector out(f.a.cols());
  for (auto _ : state) {
    k::gather(E, all, k::view(f.v), k::view(out));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * f.a.nonZeros());
}

template <k::Execution E>
void BM_RowProduct(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  Vector out(f.a.rows());
  for (auto _ : state) {
    k::row_product(E, f.rows, k::view(f.x), k::view(out));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * f.a.nonZeros());
}

template <k::Execution E>
void BM_ScatterAdd(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  const k::ColumnRange all{&f.a, 0, f.a.cols()};
  Vector out = Vector::Zero(f.a.rows());
  for (auto _ : state) {
    if constexpr (E == k::Execution::Serial) {
      k::serial::scatter_add(all, k::view(f.x), k::view(out));
    } else {
      k::parallel::scatter_add(all, k::view(f.x), k::view(out));
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * f.a.nonZeros());
}

template <k::Execution E>
void BM_Dot(benchmark::State& state) {
  CounterRng rng(5);
  Vector a(state.range(0)), b(state.range(0));
  for (auto& e : a) e = rng.normal();
  for (auto& e : b) e = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(k::dot(E, k::view(a), k::view(b)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <k::Execution E>
void BM_LemmaGrid(benchmark::State& state) {
  theory::GridSpec spec;
  spec.horizon = state.range(0);
  for (auto _ : state) {
    auto cells = theory::lemma_grid_sweep(theory::SweepMode::Fixed, spec, E);
    benchmark::DoNotOptimize(cells.data());
  }
}

constexpr auto S = k::Execution::Serial;
constexpr auto P = k::Execution::Parallel;

BENCHMARK(BM_Gather<S>)->Arg(2000)->Arg(20000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Gather<P>)->Arg(2000)->Arg(20000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RowProduct<S>)->Arg(2000)->Arg(20000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RowProduct<P>)->Arg(2000)->Arg(20000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ScatterAdd<S>)->Arg(2000)->Arg(20000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ScatterAdd<P>)->Arg(2000)->Arg(20000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Dot<S>)->Arg(1 << 16)->Arg(1 << 22)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Dot<P>)->Arg(1 << 16)->Arg(1 << 22)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LemmaGrid<S>)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LemmaGrid<P>)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
