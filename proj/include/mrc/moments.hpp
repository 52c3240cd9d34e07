#pragma once

#include <vector>

#include "mrc/feature_map.hpp"
#include "mrc/types.hpp"

namespace mrc {

/// Expectation estimate tau and confidence band lambda of Phi(x, y).
///
/// The uncertainty set is every distribution p with |E_p Phi - tau| <= lambda
/// componentwise; lambda = s * sigma_hat / sqrt(n).
struct MomentEstimate {
  Vector tau;
  Vector lambda;
  Vector sigma_hat;  // population standard deviation
  Index n = 0;
  double s = 0.0;

  void validate() const;
};

/// Moments from already transformed instances `z` (one row per sample).
MomentEstimate estimate_moments(const RowMatrix& z, const std::vector<int>& labels, int k,
                                double s);

/// Moments of Phi over a dataset whose instances are already standardized.
MomentEstimate estimate_moments(const FittedFeatureMap& map, const Matrix& instances,
                                const std::vector<int>& labels, int k, double s);

}  // namespace mrc
