#include "mrc/moments.hpp"

#include <cmath>

#include "mrc/error.hpp"

namespace mrc {

void MomentEstimate::validate() const {
  if (tau.size() == 0 || lambda.size() != tau.size() || sigma_hat.size() != tau.size())
    throw DataError("moment vectors have inconsistent lengths");
  if (n < 1 || !(s >= 0.0)) throw DataError("invalid moment sample count or band scale");
  if (!tau.allFinite() || !lambda.allFinite() || (lambda.array() < 0.0).any() ||
      (sigma_hat.array() < 0.0).any())
    throw DataError("invalid moment values");
}

MomentEstimate estimate_moments(const RowMatrix& z, const std::vector<int>& labels, int k,
                                double s) {
  const Index n = z.rows();
  const Index d_out = z.cols();
  if (n < 1) throw DataError("cannot estimate moments from an empty sample");
  if (static_cast<Index>(labels.size()) != n) throw DataError("label count mismatch");
  if (!(s >= 0.0) || !std::isfinite(s)) throw UsageError("band scale s must be finite and >= 0");

  Matrix sum = Matrix::Zero(d_out, k);
  std::vector<Index> count(static_cast<std::size_t>(k), 0);
  for (Index i = 0; i < n; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= k) throw DataError("class-count mismatch: label exceeds map class count");
    sum.col(y) += z.row(i).transpose();
    ++count[static_cast<std::size_t>(y)];
  }
  const double dn = static_cast<double>(n);
  Matrix tau = sum / dn;

  // Phi_j is z_j on samples of class y and 0 elsewhere.
  Matrix sq = Matrix::Zero(d_out, k);
  for (Index i = 0; i < n; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    sq.col(y) += (z.row(i).transpose() - tau.col(y)).array().square().matrix();
  }
  for (int y = 0; y < k; ++y) {
    sq.col(y) += static_cast<double>(n - count[static_cast<std::size_t>(y)]) *
                 tau.col(y).array().square().matrix();
  }

  MomentEstimate est;
  est.n = n;
  est.s = s;
  est.tau = Eigen::Map<const Vector>(tau.data(), tau.size());
  est.sigma_hat = (Eigen::Map<const Vector>(sq.data(), sq.size()) / dn).cwiseSqrt();
  est.lambda = s * est.sigma_hat / std::sqrt(dn);
  return est;
}

MomentEstimate estimate_moments(const FittedFeatureMap& map, const Matrix& instances,
                                const std::vector<int>& labels, int k, double s) {
  if (k != map.k_classes) throw DataError("class-count mismatch between map and dataset");
  return estimate_moments(map.transform_rows(instances), labels, k, s);
}

}  // namespace mrc
