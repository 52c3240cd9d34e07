#pragma once

#include "mrc/types.hpp"

namespace mrc::kernels {

// Row-wise building blocks of the objective. Exec::parallel splits work into
// fixed-size chunks run under OpenMP; every output entry is produced by the
// same arithmetic regardless of thread count, so results do not depend on
// OMP_NUM_THREADS. Exec::serial is a plain-loop reference kept for tests and
// the benchmark; it agrees with the parallel path up to rounding.

/// scores = z * mu_blocks, where mu_blocks is d_out x k (column y = block y).
void row_scores(const RowMatrix& z, const Matrix& mu_blocks, Matrix& scores, Exec exec);

/// Per-row loss term: best-subset value (0-1) or logsumexp (log).
void row_values(const Matrix& scores, Loss loss, Vector& values, Exec exec);

/// Per-row class weights of the subgradient: 1/|C*| on C* (0-1) or softmax (log).
void row_weights(const Matrix& scores, Loss loss, Matrix& weights, Exec exec);

/// Class weights for a single row of scores.
void single_row_weights(const double* scores, Index k, Loss loss, double* weights);

/// out = z' * weights  (d_out x k), summed in row order for every entry.
void weighted_feature_sum(const RowMatrix& z, const Matrix& weights, Matrix& out, Exec exec);

/// Number of threads the parallel path would use.
int max_threads();

}  // namespace mrc::kernels
