#include "mrc/lower_bound.hpp"

#include <string>

#include "mrc/error.hpp"
#include "mrc/kernels.hpp"
#include "mrc/lp.hpp"

namespace mrc {
namespace {

// sum p = 1 and  tau - lambda <= (band row j) <= tau + lambda  over `ncol`
// variables whose band coefficients are filled in by the caller.
struct BandedProgram {
  LinearProgram lp;
  Index m = 0;

  BandedProgram(const MomentEstimate& moments, Index ncol, Index extra_rows)
      : lp(LinearProgram::zeros(1 + moments.tau.size() + extra_rows, ncol)), m(moments.tau.size()) {
    lp.row_lower[0] = lp.row_upper[0] = 1.0;
    lp.row_lower.segment(1, m) = moments.tau - moments.lambda;
    lp.row_upper.segment(1, m) = moments.tau + moments.lambda;
  }

  // Adds `weight * z.row(row)` to the band coefficients of class block y in column `col`.
  void add_block(Index col, int y, Index d, const RowMatrix& z, Index row, double weight) {
    lp.a.col(col).segment(1 + static_cast<Index>(y) * d, d) += weight * z.row(row).transpose();
  }
};

LpResult solve_or_throw(const LinearProgram& lp) {
  LpResult res = lp_solve(lp);
  if (res.status != LpStatus::optimal)
    throw NumericError(std::string("lower-bound LP ended ") + to_string(res.status));
  return res;
}

void require_mrc(const ObjectiveSpec& spec) {
  spec.validate();
  if (spec.candidates.variant != Variant::mrc)
    throw UsageError("lower bound unavailable for CMRC");
}

double minimax_subsets(const ObjectiveSpec& spec) {
  const RowMatrix& z = spec.candidates.rows;
  const Index r = z.rows();
  const Index d = spec.d_out;
  const Index subsets = (Index{1} << spec.k) - 1;
  BandedProgram prog(spec.moments, r * subsets, 0);
  Index col = 0;
  for (Index i = 0; i < r; ++i) {
    for (Index mask = 1; mask <= subsets; ++mask, ++col) {
      prog.lp.cost[col] = 1.0;
      for (int y = 0; y < spec.k; ++y) {
        if (!(mask >> y & 1)) continue;
        prog.lp.a(0, col) += 1.0;
        prog.add_block(col, y, d, z, i, 1.0);
      }
    }
  }
  return 1.0 - solve_or_throw(prog.lp).objective;
}

double minimax_epigraph(const ObjectiveSpec& spec) {
  const RowMatrix& z = spec.candidates.rows;
  const Index r = z.rows();
  const Index d = spec.d_out;
  const Index k = spec.k;
  BandedProgram prog(spec.moments, r * k + r, r * k);
  const Index first_extra = 1 + prog.m;
  for (Index i = 0; i < r; ++i) {
    const Index t_col = r * k + i;
    prog.lp.cost[t_col] = 1.0;
    for (int y = 0; y < k; ++y) {
      const Index p_col = i * k + y;
      prog.lp.a(0, p_col) = 1.0;
      prog.add_block(p_col, y, d, z, i, 1.0);
      const Index row = first_extra + i * k + y;
      prog.lp.a(row, t_col) = 1.0;
      prog.lp.a(row, p_col) = -1.0;
      prog.lp.row_lower[row] = 0.0;
    }
  }
  return 1.0 - solve_or_throw(prog.lp).objective;
}

// Band coefficients of every (candidate, class) pair, m x (r * k).
Matrix band_matrix(const ObjectiveSpec& spec) {
  const RowMatrix& z = spec.candidates.rows;
  const Index d = spec.d_out;
  Matrix a = Matrix::Zero(spec.dim(), z.rows() * spec.k);
  for (Index i = 0; i < z.rows(); ++i)
    for (int y = 0; y < spec.k; ++y)
      a.col(i * spec.k + y).segment(static_cast<Index>(y) * d, d) = z.row(i).transpose();
  return a;
}

Vector flat_costs(const Matrix& loss) {
  Vector c(loss.size());
  for (Index i = 0; i < loss.rows(); ++i)
    for (Index y = 0; y < loss.cols(); ++y) c[i * loss.cols() + y] = loss(i, y);
  return c;
}

}  // namespace

double minimax_risk_01(const ObjectiveSpec& spec, LowerBoundForm form) {
  require_mrc(spec);
  if (form == LowerBoundForm::automatic)
    form = spec.k <= 4 ? LowerBoundForm::subsets : LowerBoundForm::epigraph;
  return form == LowerBoundForm::subsets ? minimax_subsets(spec) : minimax_epigraph(spec);
}

Matrix rule_losses(const ObjectiveSpec& spec, const Vector& mu) {
  spec.validate();
  if (mu.size() != spec.dim()) throw UsageError("mu length does not match the objective");
  const RowMatrix& z = spec.candidates.rows;
  const int k = spec.k;
  Matrix scores;
  const Eigen::Map<const Matrix> mu_blocks(mu.data(), spec.d_out, k);
  kernels::row_scores(z, mu_blocks, scores, Exec::parallel);
  Matrix loss(z.rows(), k);
  for (Index i = 0; i < z.rows(); ++i) {
    const Vector v = scores.row(i).transpose();
    if (spec.loss == Loss::log) {
      // log-softmax form keeps the cost finite when h(y|x) underflows
      const double lse = logsumexp({v.data(), static_cast<std::size_t>(k)});
      loss.row(i) = (Vector::Constant(k, lse) - v).transpose();
    } else {
      loss.row(i) = (Vector::Ones(k) - proba_from_scores(Loss::zero_one, v)).transpose();
    }
  }
  return loss;
}

double lower_bound(const ObjectiveSpec& spec, const Vector& mu) {
  require_mrc(spec);
  const Vector cost = flat_costs(rule_losses(spec, mu));
  BandedProgram prog(spec.moments, cost.size(), 0);
  prog.lp.cost = cost;
  prog.lp.a.row(0).setOnes();
  prog.lp.a.bottomRows(prog.m) = band_matrix(spec);
  return solve_or_throw(prog.lp).objective;
}

double lower_bound(const ObjectiveSpec& spec, const Vector& mu, const std::vector<int>& labels) {
  require_mrc(spec);
  const std::vector<Index>& origin = spec.candidates.origin;
  if (labels.empty() || origin.size() != labels.size())
    throw DataError("labels do not match the candidate set's source rows");
  const Index k = spec.k;
  const Index m = spec.dim();
  const Vector cost = flat_costs(rule_losses(spec, mu));
  const Matrix band = band_matrix(spec);

  // Write p = q + w * p_emp with w = 1 - sum q >= 0. The empirical
  // distribution lies inside the band, so q = 0 is a feasible vertex and
  // the simplex starts without a phase one.
  Vector p_emp = Vector::Zero(cost.size());
  const double mass = 1.0 / static_cast<double>(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k) throw DataError("label out of range");
    p_emp[origin[i] * k + labels[i]] += mass;
  }
  const Vector center = band * p_emp;
  const double base = cost.dot(p_emp);

  LinearProgram lp = LinearProgram::zeros(1 + m, cost.size());
  lp.cost = cost.array() - base;
  lp.a.row(0).setOnes();
  lp.row_upper[0] = 1.0;
  lp.a.bottomRows(m) = band - center * Vector::Ones(cost.size()).transpose();
  const Vector& tau = spec.moments.tau;
  const Vector& lambda = spec.moments.lambda;
  lp.row_lower.tail(m) = (tau - lambda - center).cwiseMin(0.0);
  lp.row_upper.tail(m) = (tau + lambda - center).cwiseMax(0.0);
  return base + solve_or_throw(lp).objective;
}

}  // namespace mrc
