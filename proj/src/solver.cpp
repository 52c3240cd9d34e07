#include "mrc/solver.hpp"

#include <cmath>
#include <limits>

#include "mrc/error.hpp"
#include "mrc/lp.hpp"

namespace mrc {

const char* to_string(Backend b) { return b == Backend::nesterov ? "nesterov" : "exact"; }

Backend parse_backend(const std::string& s) {
  if (s == "nesterov") return Backend::nesterov;
  if (s == "exact") return Backend::exact;
  throw UsageError("unknown solver '" + s + "' (expected nesterov or exact)");
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw UsageError("max_iters must be positive");
  if (!(step_scale > 0.0) || !std::isfinite(step_scale)) throw UsageError("step scale must be positive");
  if (!(tol >= 0.0)) throw UsageError("tol must be nonnegative");
}

SolverResult nesterov_minimize(const ObjectiveSpec& spec, const SolverConfig& config) {
  config.validate();
  spec.validate();
  const Index m = spec.dim();
  Vector mu = config.init ? *config.init : Vector::Zero(m);
  if (mu.size() != m) throw UsageError("initial point has the wrong length");
  Vector mu_prev = mu;
  Vector y(m);

  SolverResult result;
  result.backend = Backend::nesterov;
  result.mu_star = mu;
  result.f_star = std::numeric_limits<double>::infinity();

  int k = 0;
  for (; k < config.max_iters; ++k) {
    const double momentum = static_cast<double>(k - 1) / (k + 2);
    y = mu + momentum * (mu - mu_prev);
    const ObjectiveEval eval = evaluate_objective(spec, y, config.exec);
    if (!std::isfinite(eval.value) || !eval.subgradient.allFinite())
      throw NumericError("non-finite objective at iteration " + std::to_string(k));
    if (config.record_history) result.objective_history.push_back(eval.value);
    if (eval.value < result.f_star) {
      result.f_star = eval.value;
      result.mu_star = y;
    }
    const double gnorm = eval.subgradient.norm();
    if (gnorm == 0.0) {
      ++k;
      break;
    }
    const double step = config.step_scale / (std::sqrt(static_cast<double>(k + 1)) * (gnorm + 1e-12));
    mu_prev.swap(mu);
    mu = y - step * eval.subgradient;
  }
  result.iterations = k;
  result.f_star = objective_value(spec, result.mu_star, config.exec);
  return result;
}

SolverResult exact_minimize_01(const ObjectiveSpec& spec, double tol) {
  spec.validate();
  if (spec.loss != Loss::zero_one) throw UsageError("exact backend supports the 0-1 loss only");
  if (spec.k > 10) throw UsageError("exact backend requires at most 10 classes");

  const Index m = spec.dim();
  const Index d = spec.d_out;
  const RowMatrix& z = spec.candidates.rows;
  const Index r = z.rows();
  const bool max_mode = spec.candidates.variant == Variant::mrc;
  const Index n_nu = max_mode ? 1 : r;
  const Index subsets = (Index{1} << spec.k) - 1;

  // Columns: mu+ (m) | mu- (m) | nu (n_nu, free). Splitting mu prices |mu|
  // directly and avoids the 2m rows of an epigraph for it.
  const Index nvar = 2 * m + n_nu;
  const Index nrow = r * subsets;
  const double inf = std::numeric_limits<double>::infinity();

  LinearProgram lp = LinearProgram::zeros(nrow, nvar);
  lp.cost.head(m) = spec.moments.lambda - spec.moments.tau;
  lp.cost.segment(m, m) = spec.moments.lambda + spec.moments.tau;
  lp.cost.tail(n_nu).setConstant(max_mode ? 1.0 : 1.0 / static_cast<double>(r));
  lp.lower = Vector::Zero(nvar);
  lp.upper = Vector::Constant(nvar, inf);
  lp.lower.tail(n_nu).setConstant(-inf);

  Index row = 0;
  for (Index i = 0; i < r; ++i) {
    for (Index mask = 1; mask <= subsets; ++mask) {
      const int size = __builtin_popcountll(static_cast<unsigned long long>(mask));
      for (int y = 0; y < spec.k; ++y) {
        if (!(mask >> y & 1)) continue;
        const auto block = z.row(i) / size;
        lp.a.row(row).segment(static_cast<Index>(y) * d, d) = block;
        lp.a.row(row).segment(m + static_cast<Index>(y) * d, d) = -block;
      }
      lp.a(row, 2 * m + (max_mode ? 0 : i)) = -1.0;
      lp.row_upper[row++] = 1.0 / size;
    }
  }

  const LpResult lp_result = lp_solve(lp);
  if (lp_result.status != LpStatus::optimal)
    throw NumericError(std::string("exact backend LP ended ") + to_string(lp_result.status));

  SolverResult result;
  result.backend = Backend::exact;
  result.mu_star = lp_result.x.head(m) - lp_result.x.segment(m, m);
  result.iterations = static_cast<int>(lp_result.pivots);
  result.f_star = objective_value(spec, result.mu_star);
  const double lp_value = 1.0 + lp_result.objective;
  if (std::fabs(result.f_star - lp_value) > std::max(tol, 1e-9) * std::max(1.0, std::fabs(lp_value)))
    throw NumericError("exact backend: LP optimum " + std::to_string(lp_value) +
                       " and objective " + std::to_string(result.f_star) + " disagree");
  return result;
}

SolverResult minimize(const ObjectiveSpec& spec, const SolverConfig& config) {
  config.validate();
  if (config.backend == Backend::exact) return exact_minimize_01(spec, config.tol);
  return nesterov_minimize(spec, config);
}

}  // namespace mrc
