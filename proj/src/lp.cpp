#include "mrc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "mrc/error.hpp"

namespace mrc {
namespace {

constexpr Index kMinDegenerateStreak = 50;
constexpr Index kReinvertEvery = 50;
constexpr double kPivotTol = 1e-7;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Bounded tableau for  max c'x  s.t.  A x + s = b,  0 <= x <= ux,  0 <= s <= us.
//
// Rows 0..m-1 are constraints, row m the objective and row m+1 the phase-one
// objective; column n is the phase-one artificial and column n+1 the
// right-hand side. Each row reads  value(basic) = rhs - sum_j d(i, j) x_j
// with every nonbasic x_j at zero; a variable sitting at its upper bound is
// kept complemented (x' = u - x) so that stays true. Variable ids: column j
// is j, the slack of row i is n+i, the artificial is -1.
class Tableau {
 public:
  // twin[j] >= 0 marks column j as one half of a split free variable.
  Tableau(const RowMatrix& a, const Vector& b, const Vector& c, Vector upper,
          std::vector<Index> twin, double eps, long max_pivots)
      : m_(a.rows()), n_(a.cols()), eps_(eps), max_pivots_(max_pivots),
        d_(RowMatrix::Zero(m_ + 2, n_ + 2)), basic_(static_cast<std::size_t>(m_)),
        nonbasic_(static_cast<std::size_t>(n_ + 1)), upper_(std::move(upper)),
        flipped_(static_cast<std::size_t>(n_ + m_), 0), twin_(std::move(twin)),
        in_basis_(static_cast<std::size_t>(n_ + m_), 0), a_(a), b_(b), c_(c),
        artificial_(Vector::Zero(m_)) {
    d_.topLeftCorner(m_, n_) = a;
    d_.col(n_ + 1).head(m_) = b;
    for (Index i = 0; i < m_; ++i) {
      basic_[static_cast<std::size_t>(i)] = n_ + i;
      in_basis_[static_cast<std::size_t>(n_ + i)] = 1;
    }
    for (Index j = 0; j < n_; ++j) {
      nonbasic_[static_cast<std::size_t>(j)] = j;
      d_(m_, j) = -c[j];
    }
    nonbasic_[static_cast<std::size_t>(n_)] = -1;
    d_(m_ + 1, n_) = 1.0;
    // A slack starting above its bound is complemented, turning the
    // violation into a negative right-hand side for phase one.
    for (Index i = 0; i < m_; ++i)
      if (d_(i, n_ + 1) > upper_of(n_ + i)) complement_basic(i);
    // The artificial column is the vector of negative right-hand sides, so a
    // single pivot at artificial = 1 zeroes every violated row at once.
    for (Index i = 0; i < m_; ++i) {
      const double rhs = d_(i, n_ + 1);
      if (rhs >= 0.0) continue;
      d_(i, n_) = rhs;
      artificial_[i] = flipped_[static_cast<std::size_t>(n_ + i)] ? -rhs : rhs;
    }
    update_norms();
  }

  LpStatus solve(Vector& x, double& value) {
    Index r = -1;
    for (Index i = 0; i < m_; ++i)
      if (d_(i, n_ + 1) < -eps_ && (r == -1 || d_(i, n_ + 1) < d_(r, n_ + 1))) r = i;
    if (r != -1) {
      pivot(r, n_);
      const LpStatus phase_one = simplex(2);
      if (phase_one == LpStatus::pivot_limit) return phase_one;
      if (phase_one != LpStatus::optimal || d_(m_ + 1, n_ + 1) < -eps_) return LpStatus::infeasible;
      for (Index i = 0; i < m_; ++i) {
        if (basic_[static_cast<std::size_t>(i)] != -1) continue;
        Index s = 0;
        for (Index j = 1; j <= n_; ++j)
          if (std::fabs(d_(i, j)) > std::fabs(d_(i, s))) s = j;
        if (std::fabs(d_(i, s)) > kPivotTol) pivot(i, s);
      }
    }
    const LpStatus status = simplex(1);
    x.setZero(n_);
    for (Index i = 0; i < m_; ++i) {
      const Index var = basic_[static_cast<std::size_t>(i)];
      if (var >= 0 && var < n_) x[var] = d_(i, n_ + 1);
    }
    for (Index j = 0; j < n_; ++j)
      if (flipped_[static_cast<std::size_t>(j)]) x[j] = upper_[j] - x[j];
    value = d_(m_, n_ + 1);
    return status;
  }

  long pivots() const { return pivots_; }

 private:
  struct Step {
    Index row = -1;
    bool to_upper = false;  // the leaving variable exits at its upper bound
    bool flip = false;      // the entering variable reaches its own bound first
    double length = 0.0;
  };

  static bool less(double a, Index ia, double b, Index ib) {
    return a < b || (a == b && ia < ib);
  }

  double upper_of(Index var) const { return var < 0 ? kInf : upper_[var]; }

  // Swaps x_B for u - x_B in row i.
  void complement_basic(Index i) {
    const Index var = basic_[static_cast<std::size_t>(i)];
    d_.row(i).head(n_ + 1) *= -1.0;
    d_(i, n_ + 1) = upper_of(var) - d_(i, n_ + 1);
    flipped_[static_cast<std::size_t>(var)] ^= 1;
  }

  // Moves nonbasic column s to its other bound.
  void complement_nonbasic(Index s) {
    const Index var = nonbasic_[static_cast<std::size_t>(s)];
    const double u = upper_of(var);
    for (Index i = 0; i < m_ + 2; ++i) {
      d_(i, n_ + 1) -= d_(i, s) * u;
      d_(i, s) = -d_(i, s);
    }
    flipped_[static_cast<std::size_t>(var)] ^= 1;
    ++pivots_;
    ++since_reinvert_;
  }

  // Also refreshes the steepest-edge norms while each row is hot in cache.
  void pivot(Index r, Index s) {
    const Index width = n_ + 2;
    double* pivot_row = d_.row(r).data();
    const double inv = 1.0 / pivot_row[s];
    Eigen::Map<Vector> prow(pivot_row, width);
    prow *= inv;
    pivot_row[s] = inv;
    norms_.setOnes(n_ + 1);
    for (Index i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      double* row = d_.row(i).data();
      const double f = row[s];
      if (f != 0.0) {
        Eigen::Map<Vector>(row, width) -= f * prow;
        row[s] = -f * inv;
      }
      if (i < m_) norms_ += Eigen::Map<const Vector>(row, n_ + 1).cwiseAbs2();
    }
    if (r < m_) norms_ += prow.head(n_ + 1).cwiseAbs2();
    auto& leaving = basic_[static_cast<std::size_t>(r)];
    auto& entering = nonbasic_[static_cast<std::size_t>(s)];
    if (leaving >= 0) in_basis_[static_cast<std::size_t>(leaving)] = 0;
    if (entering >= 0) in_basis_[static_cast<std::size_t>(entering)] = 1;
    std::swap(leaving, entering);
    ++pivots_;
    ++since_reinvert_;
  }

  // phase 2 works on the feasibility row, phase 1 on the real objective.
  LpStatus simplex(int phase) {
    const Index obj = m_ + phase - 1;
    Index degenerate = 0;
    // Columns that only tiny pivots could serve are skipped until the next
    // successful step.
    std::vector<char> rejected(static_cast<std::size_t>(n_ + 1), 0);
    while (true) {
      if (pivots_ >= max_pivots_) return LpStatus::pivot_limit;
      if (since_reinvert_ >= std::max(kReinvertEvery, m_)) reinvert();
      // Bland guarantees termination but crawls, so it is only a last resort.
      const bool bland = degenerate >= std::max(kMinDegenerateStreak, m_ + n_);
      Index s = -1;
      double best = 0.0;
      for (Index j = 0; j <= n_; ++j) {
        const Index var = nonbasic_[static_cast<std::size_t>(j)];
        if (var == -phase || twin_is_basic(var)) continue;
        if (rejected[static_cast<std::size_t>(j)] || d_(obj, j) >= -eps_) continue;
        if (bland) {
          if (s == -1 || var < nonbasic_[static_cast<std::size_t>(s)]) s = j;
          continue;
        }
        const double score = d_(obj, j) / std::sqrt(norms_[j]);
        if (s == -1 || less(score, var, best, nonbasic_[static_cast<std::size_t>(s)])) {
          s = j;
          best = score;
        }
      }
      if (s == -1) {
        if (since_reinvert_ > 0 && reinvert()) {
          std::fill(rejected.begin(), rejected.end(), 0);
          continue;
        }
        return LpStatus::optimal;
      }

      const Step step = bland ? ratio_bland(s) : ratio_harris(s);
      if (step.row == -1 && !step.flip) {
        if (could_limit(s)) {
          rejected[static_cast<std::size_t>(s)] = 1;
          continue;
        }
        if (since_reinvert_ > 0 && reinvert()) {
          std::fill(rejected.begin(), rejected.end(), 0);
          continue;
        }
        return LpStatus::unbounded;
      }
      degenerate = step.length <= eps_ ? degenerate + 1 : 0;
      std::fill(rejected.begin(), rejected.end(), 0);
      if (step.flip) {
        complement_nonbasic(s);
        continue;
      }
      if (step.to_upper) complement_basic(step.row);
      // A Harris step may pick a row whose value sits just outside its
      // bound; treating it as on the bound keeps the basis feasible.
      if (d_(step.row, n_ + 1) < 0.0) d_(step.row, n_ + 1) = 0.0;
      pivot(step.row, s);
    }
  }

  // Limit on the entering step imposed by row i, or false if none.
  bool row_limit(Index i, Index s, double tol, double& ratio, bool& to_upper) const {
    const double piv = d_(i, s);
    const double rhs = d_(i, n_ + 1);
    if (piv > tol) {
      ratio = rhs / piv;
      to_upper = false;
      return true;
    }
    const double u = upper_of(basic_[static_cast<std::size_t>(i)]);
    if (piv < -tol && std::isfinite(u)) {
      ratio = (u - rhs) / -piv;
      to_upper = true;
      return true;
    }
    return false;
  }

  bool could_limit(Index s) const {
    double ratio = 0.0;
    bool to_upper = false;
    for (Index i = 0; i < m_; ++i)
      if (row_limit(i, s, eps_, ratio, to_upper)) return true;
    return false;
  }

  Step finish(Step step, Index s) const {
    const double u = upper_of(nonbasic_[static_cast<std::size_t>(s)]);
    if (std::isfinite(u) && (step.row == -1 || u <= step.length)) return {-1, false, true, u};
    return step;
  }

  // Textbook minimum ratio, ties to the lowest basic id (needed for Bland).
  Step ratio_bland(Index s) const {
    Step step;
    for (Index i = 0; i < m_; ++i) {
      double ratio = 0.0;
      bool to_upper = false;
      if (!row_limit(i, s, kPivotTol, ratio, to_upper)) continue;
      ratio = std::max(ratio, 0.0);
      if (step.row == -1 || ratio < step.length ||
          (ratio == step.length && basic_[static_cast<std::size_t>(i)] <
                                       basic_[static_cast<std::size_t>(step.row)]))
        step = {i, to_upper, false, ratio};
    }
    return finish(step, s);
  }

  // Two-pass (Harris) test: relax each bound by eps, then among the rows
  // whose exact ratio fits under the relaxed minimum take the largest pivot.
  // Small pivots are what ruins a dense tableau.
  Step ratio_harris(Index s) const {
    double bound = kInf;
    for (Index i = 0; i < m_; ++i) {
      double ratio = 0.0;
      bool to_upper = false;
      if (row_limit(i, s, kPivotTol, ratio, to_upper))
        bound = std::min(bound, ratio + eps_ / std::fabs(d_(i, s)));
    }
    Step step;
    double best_piv = 0.0;
    for (Index i = 0; i < m_; ++i) {
      double ratio = 0.0;
      bool to_upper = false;
      if (!row_limit(i, s, kPivotTol, ratio, to_upper) || ratio > bound) continue;
      const double piv = std::fabs(d_(i, s));
      if (step.row == -1 || piv > best_piv ||
          (piv == best_piv && basic_[static_cast<std::size_t>(i)] <
                                  basic_[static_cast<std::size_t>(step.row)])) {
        step = {i, to_upper, false, std::max(ratio, 0.0)};
        best_piv = piv;
      }
    }
    return finish(step, s);
  }

  // Squared column lengths 1 + sum_i d(i, j)^2 for steepest-edge pricing.
  void update_norms() {
    norms_.setOnes(n_ + 1);
    for (Index i = 0; i < m_; ++i) norms_ += d_.row(i).head(n_ + 1).transpose().cwiseAbs2();
  }

  // Column of variable `var` in  [A | artificial | I]  before complementing.
  void original_column(Index var, Eigen::Ref<Vector> out) const {
    if (var == -1) {
      out = artificial_;
    } else if (var < n_) {
      out = a_.col(var);
    } else {
      out.setZero();
      out[var - n_] = 1.0;
    }
  }

  void column(Index var, Eigen::Ref<Vector> out) const {
    original_column(var, out);
    if (var >= 0 && flipped_[static_cast<std::size_t>(var)]) out = -out;
  }

  double cost(Index var, int phase) const {
    if (phase == 2) return var == -1 ? -1.0 : 0.0;
    if (var < 0 || var >= n_) return 0.0;
    return flipped_[static_cast<std::size_t>(var)] ? -c_[var] : c_[var];
  }

  // Rebuilds every entry from the original data for the current basis,
  // discarding accumulated round-off. Returns false if the basis matrix is
  // numerically singular, in which case the tableau is left untouched.
  bool reinvert() {
    since_reinvert_ = 0;
    Matrix basis_matrix(m_, m_);
    for (Index i = 0; i < m_; ++i) column(basic_[static_cast<std::size_t>(i)], basis_matrix.col(i));
    const Eigen::PartialPivLU<Matrix> lu(basis_matrix);
    const Vector diag = lu.matrixLU().diagonal().cwiseAbs();
    if (m_ > 0 && !(diag.minCoeff() > 1e-11 * std::max(1.0, diag.maxCoeff()))) return false;

    Matrix rhs(m_, n_ + 2);
    for (Index j = 0; j <= n_; ++j) column(nonbasic_[static_cast<std::size_t>(j)], rhs.col(j));
    Vector b = b_;
    double offset = 0.0;  // objective value of the complemented variables at their bounds
    Vector col(m_);
    for (Index var = 0; var < n_ + m_; ++var) {
      if (!flipped_[static_cast<std::size_t>(var)]) continue;
      original_column(var, col);
      b -= upper_[var] * col;
      if (var < n_) offset += c_[var] * upper_[var];
    }
    rhs.col(n_ + 1) = b;
    const Matrix body = lu.solve(rhs);
    if (!body.allFinite()) return false;
    d_.topRows(m_) = body;
    for (int phase = 1; phase <= 2; ++phase) {
      Vector cb(m_);
      for (Index i = 0; i < m_; ++i) cb[i] = cost(basic_[static_cast<std::size_t>(i)], phase);
      const Index row = m_ + phase - 1;
      d_.row(row) = (cb.transpose() * body).eval();
      for (Index j = 0; j <= n_; ++j) d_(row, j) -= cost(nonbasic_[static_cast<std::size_t>(j)], phase);
      if (phase == 1) d_(row, n_ + 1) += offset;
    }
    update_norms();
    return true;
  }

  // The twin of a basic split column has reduced cost exactly zero; round-off
  // would otherwise present it as an improving ray.
  bool twin_is_basic(Index var) const {
    if (var < 0 || var >= n_) return false;
    const Index t = twin_[static_cast<std::size_t>(var)];
    return t >= 0 && in_basis_[static_cast<std::size_t>(t)];
  }

  Index m_;
  Index n_;
  double eps_;
  long max_pivots_;
  long pivots_ = 0;
  RowMatrix d_;
  std::vector<Index> basic_;
  std::vector<Index> nonbasic_;
  Vector upper_;
  std::vector<char> flipped_;
  std::vector<Index> twin_;
  std::vector<char> in_basis_;
  RowMatrix a_;
  Vector b_;
  Vector c_;
  Vector artificial_;
  Vector norms_;
  Index since_reinvert_ = 0;
};

// How one original variable maps onto nonnegative tableau columns:
// x = offset + sign * t_first  (- t_second for free variables).
struct ColumnMap {
  double offset = 0.0;
  double sign = 1.0;
  Index first = 0;
  Index second = -1;
};

}  // namespace

LinearProgram LinearProgram::zeros(Index rows, Index cols) {
  LinearProgram lp;
  lp.cost = Vector::Zero(cols);
  lp.a = Matrix::Zero(rows, cols);
  lp.row_lower = Vector::Constant(rows, -kInf);
  lp.row_upper = Vector::Constant(rows, kInf);
  return lp;
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::pivot_limit: return "pivot limit";
  }
  return "?";
}

LpResult lp_solve(const LinearProgram& lp, const LpOptions& options) {
  const Index nvar = lp.cost.size();
  const Index nrow = lp.a.rows();
  if (lp.a.cols() != nvar || lp.row_lower.size() != nrow || lp.row_upper.size() != nrow)
    throw UsageError("lp_solve: inconsistent problem dimensions");
  const bool default_bounds = lp.lower.size() == 0 && lp.upper.size() == 0;
  if (!default_bounds && (lp.lower.size() != nvar || lp.upper.size() != nvar))
    throw UsageError("lp_solve: bound vectors must match the variable count");

  std::vector<ColumnMap> cols(static_cast<std::size_t>(nvar));
  std::vector<double> col_upper;
  Index ncol = 0;
  for (Index j = 0; j < nvar; ++j) {
    const double lo = default_bounds ? 0.0 : lp.lower[j];
    const double hi = default_bounds ? kInf : lp.upper[j];
    if (lo > hi) return {LpStatus::infeasible, {}, 0.0, 0};
    ColumnMap& col = cols[static_cast<std::size_t>(j)];
    if (std::isfinite(lo)) {
      col = {lo, 1.0, ncol++, -1};
      col_upper.push_back(hi - lo);
    } else if (std::isfinite(hi)) {
      col = {hi, -1.0, ncol++, -1};
      col_upper.push_back(kInf);
    } else {
      col = {0.0, 1.0, ncol, ncol + 1};
      ncol += 2;
      col_upper.insert(col_upper.end(), 2, kInf);
    }
  }

  // Row i becomes  row x + s = b  with 0 <= s <= width; a row bounded only
  // from below is negated first.
  std::vector<Index> kept;
  for (Index i = 0; i < nrow; ++i) {
    if (lp.row_lower[i] > lp.row_upper[i]) return {LpStatus::infeasible, {}, 0.0, 0};
    if (std::isfinite(lp.row_lower[i]) || std::isfinite(lp.row_upper[i])) kept.push_back(i);
  }
  const Index ntab_rows = static_cast<Index>(kept.size());
  RowMatrix a = RowMatrix::Zero(ntab_rows, ncol);
  Vector b(ntab_rows);
  Vector upper(ncol + ntab_rows);
  for (Index j = 0; j < ncol; ++j) upper[j] = col_upper[static_cast<std::size_t>(j)];
  Vector row(ncol);
  for (Index out = 0; out < ntab_rows; ++out) {
    const Index i = kept[static_cast<std::size_t>(out)];
    row.setZero();
    double shift = 0.0;
    for (Index j = 0; j < nvar; ++j) {
      const double aij = lp.a(i, j);
      if (aij == 0.0) continue;
      const ColumnMap& col = cols[static_cast<std::size_t>(j)];
      shift += aij * col.offset;
      row[col.first] += aij * col.sign;
      if (col.second >= 0) row[col.second] -= aij;
    }
    const double lo = lp.row_lower[i] - shift;
    const double hi = lp.row_upper[i] - shift;
    if (std::isfinite(hi)) {
      a.row(out) = row.transpose();
      b[out] = hi;
      upper[ncol + out] = std::isfinite(lo) ? std::max(hi - lo, 0.0) : kInf;
    } else {
      a.row(out) = -row.transpose();
      b[out] = -lo;
      upper[ncol + out] = kInf;
    }
  }

  Vector c = Vector::Zero(ncol);
  for (Index j = 0; j < nvar; ++j) {
    const ColumnMap& col = cols[static_cast<std::size_t>(j)];
    c[col.first] -= lp.cost[j] * col.sign;  // tableau maximizes -cost
    if (col.second >= 0) c[col.second] += lp.cost[j];
  }
  std::vector<Index> twin(static_cast<std::size_t>(ncol), -1);
  for (const ColumnMap& col : cols) {
    if (col.second < 0) continue;
    twin[static_cast<std::size_t>(col.first)] = col.second;
    twin[static_cast<std::size_t>(col.second)] = col.first;
  }

  long max_pivots = options.max_pivots;
  if (max_pivots <= 0) max_pivots = 50 * (ntab_rows + ncol) + 10000;
  Tableau tableau(a, b, c, std::move(upper), std::move(twin), options.tol, max_pivots);
  Vector t;
  double value = 0.0;
  LpResult result;
  result.status = tableau.solve(t, value);
  result.pivots = tableau.pivots();
  if (result.status != LpStatus::optimal) return result;

  result.x.resize(nvar);
  for (Index j = 0; j < nvar; ++j) {
    const ColumnMap& col = cols[static_cast<std::size_t>(j)];
    double v = col.offset + col.sign * t[col.first];
    if (col.second >= 0) v -= t[col.second];
    result.x[j] = v;
  }
  result.objective = lp.cost.dot(result.x);
  return result;
}

}  // namespace mrc
