#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mrc/dataset.hpp"
#include "mrc/feature_map.hpp"
#include "mrc/moments.hpp"
#include "mrc/objective.hpp"
#include "mrc/solver.hpp"
#include "mrc/types.hpp"

namespace mrc {

struct FitOptions {
  Variant variant = Variant::mrc;
  Loss loss = Loss::zero_one;
  FeatureMapConfig map;
  double s = 0.3;
  SolverConfig solver;
};

struct SolverSummary {
  Backend backend = Backend::nesterov;
  int iterations = 0;
  double f_star = 0.0;
};

/// A fitted minimax risk classifier: everything predict needs plus the bounds.
///
/// All bounds refer to distributions supported on the training instances.
/// For CMRC `upper_bound` is the optimal objective value, not a bound on the
/// expected loss, and `lower_bound` is absent.
struct MRCModel {
  Variant variant = Variant::mrc;
  Loss loss = Loss::zero_one;
  FittedFeatureMap feature_map;
  StandardizationStats standardization;
  MomentEstimate moments;
  Vector mu;
  std::vector<std::string> class_labels;
  double upper_bound = 0.0;
  std::optional<double> lower_bound;
  SolverSummary solver;

  int num_classes() const { return static_cast<int>(class_labels.size()); }
  bool upper_is_risk_bound() const { return variant == Variant::mrc; }

  /// Throws DataError on any violated model invariant.
  void validate() const;
};

/// Pieces of the learning problem built from a training set.
struct TrainingProblem {
  StandardizationStats standardization;
  FittedFeatureMap feature_map;
  RowMatrix z;  // transformed training instances
  ObjectiveSpec objective;
};

TrainingProblem build_problem(const FitOptions& options, const LabeledDataset& train);

/// standardize -> fit_map -> candidates -> moments -> solve -> bounds.
MRCModel fit(const FitOptions& options, const LabeledDataset& train);

/// Bounds recomputed for a stored model against its training data.
struct BoundReport {
  double upper_bound = 0.0;
  std::optional<double> lower_bound;
};
BoundReport recompute_bounds(const MRCModel& model, const LabeledDataset& train);

Matrix predict_proba(const MRCModel& model, const Matrix& x);
/// Argmax class index per row; ties go to the smallest index.
std::vector<int> predict_indices(const MRCModel& model, const Matrix& x);
std::vector<std::string> predict(const MRCModel& model, const Matrix& x);

double get_upper_bound(const MRCModel& model);
/// Throws UsageError for CMRC models.
double get_lower_bound(const MRCModel& model);

struct Metrics {
  double error_rate = 0.0;
  double mean_log_loss = 0.0;
  // 0-1 loss of the randomized rule that draws y ~ h(.|x); this is the
  // quantity the 0-1 bounds refer to.
  double expected_01_loss = 0.0;
  Index clamped = 0;  // probabilities raised to the 1e-12 floor
};

/// `test.class_labels` must be the model's class list (see load_csv_with_classes).
Metrics evaluate(const MRCModel& model, const LabeledDataset& test);

}  // namespace mrc
