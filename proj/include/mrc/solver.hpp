#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrc/objective.hpp"
#include "mrc/types.hpp"

namespace mrc {

enum class Backend { nesterov, exact };

const char* to_string(Backend b);
Backend parse_backend(const std::string& s);

struct SolverConfig {
  Backend backend = Backend::nesterov;
  int max_iters = 10000;
  std::optional<Vector> init;  // empty starts from zeros
  double step_scale = 1.0;
  double tol = 1e-6;  // exact backend
  std::uint64_t seed = 0;
  bool record_history = false;
  Exec exec = Exec::parallel;

  void validate() const;
};

struct SolverResult {
  Vector mu_star;
  double f_star = 0.0;
  int iterations = 0;
  Backend backend = Backend::nesterov;
  std::vector<double> objective_history;  // F at each evaluated point, when recorded
};

/// Accelerated subgradient descent with best-iterate output.
///
///   y_k     = mu_k + (k - 1) / (k + 2) * (mu_k - mu_{k-1})
///   mu_{k+1} = y_k - eta / (sqrt(k + 1) * (|g_k| + 1e-12)) * g_k,   g_k in dF(y_k)
///
/// The returned point is the evaluated y_k with the smallest objective, so
/// f_star <= F(init) and f_star is an upper bound on min F whatever the
/// iteration count.
SolverResult nesterov_minimize(const ObjectiveSpec& spec, const SolverConfig& config);

/// Exact minimum of a 0-1 objective through its LP epigraph form:
/// variables mu, a >= |mu| and the per-row epigraph variable(s) nu with
/// nu >= (sum_{y in C} v(z)_y - 1) / |C| for every row z and nonempty C.
/// Requires k <= 10.
SolverResult exact_minimize_01(const ObjectiveSpec& spec, double tol = 1e-6);

SolverResult minimize(const ObjectiveSpec& spec, const SolverConfig& config);

}  // namespace mrc
