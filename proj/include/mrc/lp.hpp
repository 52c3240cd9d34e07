#pragma once

#include "mrc/types.hpp"

namespace mrc {

/// minimize cost'x  s.t.  row_lower <= a x <= row_upper,  lower <= x <= upper.
///
/// Any bound may be infinite; equal row bounds give an equality. Empty
/// `lower`/`upper` mean x >= 0.
struct LinearProgram {
  Vector cost;
  Matrix a;
  Vector row_lower;
  Vector row_upper;
  Vector lower;
  Vector upper;

  /// Zero program with `rows` free rows (-inf, inf) and default bounds.
  static LinearProgram zeros(Index rows, Index cols);
};

enum class LpStatus { optimal, infeasible, unbounded, pivot_limit };

const char* to_string(LpStatus status);

struct LpOptions {
  double tol = 1e-9;
  long max_pivots = 0;  // 0 selects a size-based default
};

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vector x;
  double objective = 0.0;
  long pivots = 0;
};

/// Dense two-phase bounded-variable tableau simplex.
///
/// Every row becomes one tableau row whose slack carries the row's range as
/// an upper bound, so ranged and equality rows cost no more than one-sided
/// ones. Entering columns are priced by steepest edge (ties to the lowest
/// variable id); after a long run of degenerate pivots the rule switches
/// to Bland's smallest-index rule until the objective moves again. The ratio
/// test is two-pass (Harris) with a pivot tolerance, and the tableau is
/// rebuilt from the original data every max(50, rows) pivots and before any
/// verdict. The pivot sequence is a pure function of the input.
LpResult lp_solve(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace mrc
