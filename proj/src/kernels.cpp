#include "mrc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <omp.h>

#include "mrc/objective.hpp"

namespace mrc::kernels {
namespace {

constexpr Index kRowChunk = 256;
constexpr Index kColChunk = 64;

Index chunk_count(Index n, Index chunk) { return (n + chunk - 1) / chunk; }

double row_value(const double* s, Index k, Loss loss, std::vector<int>& order) {
  const std::span<const double> v(s, static_cast<std::size_t>(k));
  if (loss == Loss::log) return logsumexp(v);
  int size = 0;
  return best_subset_into(v, order, size);
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

void single_row_weights(const double* scores, Index k, Loss loss, double* weights) {
  const std::span<const double> v(scores, static_cast<std::size_t>(k));
  std::fill(weights, weights + k, 0.0);
  if (loss == Loss::log) {
    const double top = *std::max_element(v.begin(), v.end());
    double total = 0.0;
    for (Index y = 0; y < k; ++y) total += weights[y] = std::exp(v[y] - top);
    for (Index y = 0; y < k; ++y) weights[y] /= total;
    return;
  }
  std::vector<int> order(static_cast<std::size_t>(k));
  int size = 0;
  best_subset_into(v, order, size);
  for (int i = 0; i < size; ++i) weights[order[i]] = 1.0 / size;
}

void row_scores(const RowMatrix& z, const Matrix& mu_blocks, Matrix& scores, Exec exec) {
  const Index r = z.rows();
  const Index d = z.cols();
  const Index k = mu_blocks.cols();
  scores.resize(r, k);
  if (exec == Exec::serial) {
    for (Index i = 0; i < r; ++i)
      for (Index y = 0; y < k; ++y) {
        double acc = 0.0;
        for (Index j = 0; j < d; ++j) acc += z(i, j) * mu_blocks(j, y);
        scores(i, y) = acc;
      }
    return;
  }
  const Index chunks = chunk_count(r, kRowChunk);
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < chunks; ++c) {
    const Index begin = c * kRowChunk;
    const Index len = std::min(kRowChunk, r - begin);
    scores.middleRows(begin, len).noalias() = z.middleRows(begin, len) * mu_blocks;
  }
}

void row_values(const Matrix& scores, Loss loss, Vector& values, Exec exec) {
  const Index r = scores.rows();
  const Index k = scores.cols();
  values.resize(r);
  // Row-major copy keeps each row's scores contiguous.
  const RowMatrix s = scores;
  if (exec == Exec::serial) {
    std::vector<int> order(static_cast<std::size_t>(k));
    for (Index i = 0; i < r; ++i) values[i] = row_value(s.row(i).data(), k, loss, order);
    return;
  }
#pragma omp parallel
  {
    std::vector<int> order(static_cast<std::size_t>(k));
#pragma omp for schedule(static)
    for (Index i = 0; i < r; ++i) values[i] = row_value(s.row(i).data(), k, loss, order);
  }
}

void row_weights(const Matrix& scores, Loss loss, Matrix& weights, Exec exec) {
  const Index r = scores.rows();
  const Index k = scores.cols();
  const RowMatrix s = scores;
  RowMatrix w(r, k);
  if (exec == Exec::serial) {
    for (Index i = 0; i < r; ++i) single_row_weights(s.row(i).data(), k, loss, w.row(i).data());
  } else {
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < r; ++i) single_row_weights(s.row(i).data(), k, loss, w.row(i).data());
  }
  weights = w;
}

void weighted_feature_sum(const RowMatrix& z, const Matrix& weights, Matrix& out, Exec exec) {
  const Index r = z.rows();
  const Index d = z.cols();
  const Index k = weights.cols();
  out.setZero(d, k);
  if (exec == Exec::serial) {
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < d; ++j)
        for (Index y = 0; y < k; ++y) out(j, y) += z(i, j) * weights(i, y);
    return;
  }
  const Index chunks = chunk_count(d, kColChunk);
#pragma omp parallel for schedule(static)
  for (Index c = 0; c < chunks; ++c) {
    const Index begin = c * kColChunk;
    const Index len = std::min(kColChunk, d - begin);
    out.middleRows(begin, len).noalias() = z.middleCols(begin, len).transpose() * weights;
  }
}

}  // namespace mrc::kernels
