// Serial reference vs OpenMP kernels on one objective evaluation and its parts.
//   ./mrc_bench --benchmark_filter=objective

#include <benchmark/benchmark.h>

#include "mrc/kernels.hpp"
#include "mrc/objective.hpp"
#include "mrc/random.hpp"

using namespace mrc;

namespace {

constexpr int kClasses = 4;

ObjectiveSpec make_spec(Index n, Index d_out, Loss loss) {
  Rng rng(1);
  RowMatrix z(n, d_out);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d_out; ++j) z(i, j) = j == 0 ? 1.0 : rng.normal();
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i % kClasses);
  ObjectiveSpec spec;
  spec.loss = loss;
  spec.k = kClasses;
  spec.d_out = d_out;
  spec.candidates = make_candidates(z, Variant::cmrc);
  spec.moments = estimate_moments(z, labels, kClasses, 0.3);
  return spec;
}

Vector make_mu(Index m) {
  Rng rng(2);
  Vector mu(m);
  for (Index i = 0; i < m; ++i) mu[i] = 0.1 * rng.normal();
  return mu;
}

template <Exec exec, Loss loss>
void objective(benchmark::State& state) {
  const ObjectiveSpec spec = make_spec(state.range(0), state.range(1), loss);
  const Vector mu = make_mu(spec.dim());
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_objective(spec, mu, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Exec exec>
void scores(benchmark::State& state) {
  const ObjectiveSpec spec = make_spec(state.range(0), state.range(1), Loss::zero_one);
  const Vector mu = make_mu(spec.dim());
  const Eigen::Map<const Matrix> blocks(mu.data(), spec.d_out, kClasses);
  Matrix out;
  for (auto _ : state) {
    kernels::row_scores(spec.candidates.rows, blocks, out, exec);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <Exec exec>
void feature_sum(benchmark::State& state) {
  const ObjectiveSpec spec = make_spec(state.range(0), state.range(1), Loss::zero_one);
  const Matrix weights = Matrix::Constant(state.range(0), kClasses, 0.25);
  Matrix out;
  for (auto _ : state) {
    kernels::weighted_feature_sum(spec.candidates.rows, weights, out, exec);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int n : {1000, 10000, 100000}) b->Args({n, 64});
  b->Args({1000, 501});
  b->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(objective<Exec::serial, Loss::zero_one>)->Name("objective/0-1/serial")->Apply(sizes);
BENCHMARK(objective<Exec::parallel, Loss::zero_one>)->Name("objective/0-1/parallel")->Apply(sizes);
BENCHMARK(objective<Exec::serial, Loss::log>)->Name("objective/log/serial")->Apply(sizes);
BENCHMARK(objective<Exec::parallel, Loss::log>)->Name("objective/log/parallel")->Apply(sizes);
BENCHMARK(scores<Exec::serial>)->Name("row_scores/serial")->Apply(sizes);
BENCHMARK(scores<Exec::parallel>)->Name("row_scores/parallel")->Apply(sizes);
BENCHMARK(feature_sum<Exec::serial>)->Name("weighted_feature_sum/serial")->Apply(sizes);
BENCHMARK(feature_sum<Exec::parallel>)->Name("weighted_feature_sum/parallel")->Apply(sizes);

BENCHMARK_MAIN();
