#pragma once

#include <vector>

#include "mrc/objective.hpp"
#include "mrc/types.hpp"

namespace mrc {

// Programs over the distributions the MRC (max-mode) problem considers: p on
// candidate rows x classes with p >= 0, sum p = 1 and
// |sum p(x, y) Phi(x, y) - tau| <= lambda componentwise.

/// Smallest expected loss of the rule fitted at `mu` over all feasible p:
/// min_p sum p(x, y) l(h_mu, x, y), with l = 1 - h(y|x) for the 0-1 loss and
/// -log h(y|x) for the log loss. Never exceeds F(mu), since F(mu) bounds
/// the loss of h_mu under every feasible p.
double lower_bound(const ObjectiveSpec& spec, const Vector& mu);

/// Same value, computed relative to the empirical distribution of the rows
/// the candidates were built from (`labels[i]` is the class of source row
/// i). Starting from a feasible point makes this form much faster.
double lower_bound(const ObjectiveSpec& spec, const Vector& mu, const std::vector<int>& labels);

/// Loss of the fitted rule on each candidate row and class, rows x k.
Matrix rule_losses(const ObjectiveSpec& spec, const Vector& mu);

enum class LowerBoundForm {
  automatic,  // subsets for k <= 4, epigraph otherwise
  epigraph,   // p and t_x >= p(x, y), minimizing sum t
  subsets,    // p(x, .) written as sum_C beta_{x,C} 1_C, minimizing sum beta
};

/// Largest Bayes 0-1 risk over feasible p: 1 - min_p sum_x max_y p(x, y).
/// This is the LP dual of min_mu F(mu), so it equals the minimax risk.
double minimax_risk_01(const ObjectiveSpec& spec, LowerBoundForm form = LowerBoundForm::automatic);

}  // namespace mrc
