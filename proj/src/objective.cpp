#include "mrc/objective.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "mrc/error.hpp"
#include "mrc/kernels.hpp"

namespace mrc {

double best_subset_into(std::span<const double> v, std::span<int> order, int& size) {
  const int k = static_cast<int>(v.size());
  std::iota(order.begin(), order.begin() + k, 0);
  std::sort(order.begin(), order.begin() + k, [&](int a, int b) {
    return v[a] > v[b] || (v[a] == v[b] && a < b);
  });
  double prefix = 0.0;
  double best = -INFINITY;
  size = 0;
  for (int j = 0; j < k; ++j) {
    prefix += v[order[j]];
    const double value = (prefix - 1.0) / (j + 1);
    if (value > best) {
      best = value;
      size = j + 1;
    }
  }
  return best;
}

SubsetChoice best_subset(std::span<const double> v) {
  if (v.size() < 2) throw UsageError("best_subset needs at least two classes");
  for (double x : v)
    if (!std::isfinite(x)) throw NumericError("best_subset: non-finite score");
  std::vector<int> order(v.size());
  int size = 0;
  SubsetChoice choice;
  choice.value = best_subset_into(v, order, size);
  choice.classes.assign(order.begin(), order.begin() + size);
  std::sort(choice.classes.begin(), choice.classes.end());
  return choice;
}

double logsumexp(std::span<const double> v) {
  const double top = *std::max_element(v.begin(), v.end());
  double total = 0.0;
  for (double x : v) total += std::exp(x - top);
  return top + std::log(total);
}

CandidateSet make_candidates(const RowMatrix& z, Variant variant) {
  if (z.rows() < 1) throw DataError("candidate set must be non-empty");
  CandidateSet set;
  set.variant = variant;
  set.origin.resize(static_cast<std::size_t>(z.rows()));
  if (variant == Variant::cmrc) {
    set.rows = z;
    for (Index i = 0; i < z.rows(); ++i) set.origin[static_cast<std::size_t>(i)] = i;
    return set;
  }
  std::map<std::vector<double>, Index> seen;
  std::vector<Index> keep;
  for (Index i = 0; i < z.rows(); ++i) {
    std::vector<double> key(z.row(i).data(), z.row(i).data() + z.cols());
    const auto [it, fresh] = seen.emplace(std::move(key), static_cast<Index>(keep.size()));
    if (fresh) keep.push_back(i);
    set.origin[static_cast<std::size_t>(i)] = it->second;
  }
  set.rows.resize(static_cast<Index>(keep.size()), z.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) set.rows.row(static_cast<Index>(i)) = z.row(keep[i]);
  return set;
}

void ObjectiveSpec::validate() const {
  if (k < 2) throw UsageError("objective needs at least two classes");
  if (candidates.rows.rows() < 1 || candidates.rows.cols() != d_out)
    throw DataError("candidate rows do not match d_out");
  if (moments.tau.size() != dim() || moments.lambda.size() != dim())
    throw DataError("moment length does not match k * d_out");
}

ObjectiveEval evaluate_objective(const ObjectiveSpec& spec, const Vector& mu, Exec exec) {
  const Index m = spec.dim();
  if (mu.size() != m)
    throw DataError("dimension mismatch: mu has " + std::to_string(mu.size()) + " entries, expected " +
                    std::to_string(m));
  const RowMatrix& z = spec.candidates.rows;
  const Index r = z.rows();
  const Eigen::Map<const Matrix> mu_blocks(mu.data(), spec.d_out, spec.k);

  Matrix scores;
  kernels::row_scores(z, mu_blocks, scores, exec);
  Vector values;
  kernels::row_values(scores, spec.loss, values, exec);

  ObjectiveEval out;
  out.subgradient = -spec.moments.tau + spec.moments.lambda.cwiseProduct(mu.cwiseSign());
  double linear = (spec.loss == Loss::zero_one ? 1.0 : 0.0) - spec.moments.tau.dot(mu) +
                  spec.moments.lambda.dot(mu.cwiseAbs());

  double row_term = 0.0;
  if (spec.candidates.variant == Variant::mrc) {
    Index active = 0;
    for (Index i = 1; i < r; ++i)
      if (values[i] > values[active]) active = i;
    row_term = values[active];
    const Vector row_scores_active = scores.row(active).transpose();
    Vector w(spec.k);
    kernels::single_row_weights(row_scores_active.data(), spec.k, spec.loss, w.data());
    for (int y = 0; y < spec.k; ++y) {
      if (w[y] != 0.0)
        out.subgradient.segment(static_cast<Index>(y) * spec.d_out, spec.d_out) +=
            w[y] * z.row(active).transpose();
    }
  } else {
    for (Index i = 0; i < r; ++i) row_term += values[i];
    row_term /= static_cast<double>(r);
    Matrix weights;
    kernels::row_weights(scores, spec.loss, weights, exec);
    Matrix grad;
    kernels::weighted_feature_sum(z, weights, grad, exec);
    out.subgradient += Eigen::Map<const Vector>(grad.data(), grad.size()) / static_cast<double>(r);
  }
  out.value = linear + row_term;
  return out;
}

double objective_value(const ObjectiveSpec& spec, const Vector& mu, Exec exec) {
  const Index m = spec.dim();
  if (mu.size() != m) throw DataError("dimension mismatch: mu length");
  const Eigen::Map<const Matrix> mu_blocks(mu.data(), spec.d_out, spec.k);
  Matrix scores;
  kernels::row_scores(spec.candidates.rows, mu_blocks, scores, exec);
  Vector values;
  kernels::row_values(scores, spec.loss, values, exec);
  double row_term = 0.0;
  if (spec.candidates.variant == Variant::mrc) {
    row_term = values.maxCoeff();
  } else {
    for (Index i = 0; i < values.size(); ++i) row_term += values[i];
    row_term /= static_cast<double>(values.size());
  }
  return (spec.loss == Loss::zero_one ? 1.0 : 0.0) - spec.moments.tau.dot(mu) +
         spec.moments.lambda.dot(mu.cwiseAbs()) + row_term;
}

Vector class_scores(const Vector& mu, const Vector& z, int k) {
  if (mu.size() != static_cast<Index>(k) * z.size())
    throw DataError("dimension mismatch between mu and features");
  const Eigen::Map<const Matrix> mu_blocks(mu.data(), z.size(), k);
  return mu_blocks.transpose() * z;
}

Vector proba_from_scores(Loss loss, const Vector& scores) {
  const Index k = scores.size();
  Vector h(k);
  if (loss == Loss::log) {
    kernels::single_row_weights(scores.data(), k, loss, h.data());
    return h;
  }
  const SubsetChoice choice = best_subset(std::span<const double>(scores.data(), static_cast<std::size_t>(k)));
  for (Index y = 0; y < k; ++y) h[y] = std::max(scores[y] - choice.value, 0.0);
  return h;
}

Vector predict_proba_rule(Loss loss, const Vector& mu, const Vector& z, int k) {
  return proba_from_scores(loss, class_scores(mu, z, k));
}

}  // namespace mrc
