#pragma once

#include <span>
#include <vector>

#include "mrc/moments.hpp"
#include "mrc/types.hpp"

namespace mrc {

/// Maximizer of (sum_{y in C} v_y - 1) / |C| over nonempty class subsets C.
struct SubsetChoice {
  double value = 0.0;        // also the threshold c of the 0-1 prediction rule
  std::vector<int> classes;  // ascending class indices
};

/// O(k log k): the maximizer is a prefix of v sorted descending (ties by
/// class index); among equal values the shortest prefix wins.
SubsetChoice best_subset(std::span<const double> v);

/// Allocation-free core of best_subset. `order` must have room for v.size()
/// entries; on return its first `size` entries hold the chosen classes in
/// descending-score order.
double best_subset_into(std::span<const double> v, std::span<int> order, int& size);

/// Rows over which the worst case (MRC) or the empirical average (CMRC) is taken.
struct CandidateSet {
  RowMatrix rows;  // r x d_out transformed instances
  Variant variant = Variant::mrc;
  std::vector<Index> origin;  // candidate row of each input row
};

/// MRC keeps distinct rows in first-occurrence order; CMRC keeps every row.
CandidateSet make_candidates(const RowMatrix& z, Variant variant);

struct ObjectiveSpec {
  Loss loss = Loss::zero_one;
  CandidateSet candidates;
  MomentEstimate moments;
  int k = 2;
  Index d_out = 0;

  Index dim() const { return static_cast<Index>(k) * d_out; }
  void validate() const;
};

struct ObjectiveEval {
  double value = 0.0;
  Vector subgradient;
};

/// Objective value and one subgradient.
///
///   0-1: F(mu) = 1 - tau'mu + lambda'|mu| + agg_rows best_subset(v(z)).value
///   log: F(mu) =   - tau'mu + lambda'|mu| + agg_rows logsumexp(v(z))
///
/// with v(z)_y = z' mu_y and agg = max (MRC) or mean (CMRC). In max mode the
/// first maximizing row supplies the subgradient.
ObjectiveEval evaluate_objective(const ObjectiveSpec& spec, const Vector& mu,
                                 Exec exec = Exec::parallel);

double objective_value(const ObjectiveSpec& spec, const Vector& mu, Exec exec = Exec::parallel);

/// Per-class scores v_y = z' mu_y.
Vector class_scores(const Vector& mu, const Vector& z, int k);

/// Classification probabilities: (v - c)_+ for 0-1, softmax(v) for log.
Vector predict_proba_rule(Loss loss, const Vector& mu, const Vector& z, int k);

/// Probabilities from precomputed scores.
Vector proba_from_scores(Loss loss, const Vector& scores);

double logsumexp(std::span<const double> v);

}  // namespace mrc
