#include "mrc/classifier.hpp"

#include <cmath>

#include "mrc/error.hpp"
#include "mrc/lower_bound.hpp"

namespace mrc {
namespace {

constexpr double kProbabilityFloor = 1e-12;

std::optional<double> compute_lower(const MRCModel& model, const ObjectiveSpec& objective,
                                     const std::vector<int>& labels) {
  if (model.variant != Variant::mrc) return std::nullopt;
  return lower_bound(objective, model.mu, labels);
}

}  // namespace

void MRCModel::validate() const {
  const int k = num_classes();
  if (k < 2) throw DataError("model has fewer than two classes");
  feature_map.validate();
  if (feature_map.k_classes != k) throw DataError("feature map class count mismatch");
  moments.validate();
  const Index m = static_cast<Index>(k) * feature_map.d_out;
  if (mu.size() != m || moments.tau.size() != m) throw DataError("mu length does not match k * d_out");
  if (!mu.allFinite()) throw DataError("non-finite mu");
  if (standardization.mean.size() != feature_map.d_in ||
      standardization.std.size() != feature_map.d_in || (standardization.std.array() < 0.0).any())
    throw DataError("standardization does not match the feature map input");
  if (!std::isfinite(upper_bound)) throw DataError("non-finite upper bound");
  if (variant == Variant::cmrc && lower_bound) throw DataError("CMRC model carries a lower bound");
  if (lower_bound) {
    if (!std::isfinite(*lower_bound)) throw DataError("non-finite lower bound");
    if (*lower_bound > upper_bound + 1e-9) throw DataError("lower bound exceeds upper bound");
  }
  if (loss == Loss::zero_one) {
    if (upper_bound < -1e-9 || upper_bound > 1.0 - 1.0 / k + 1e-9)
      throw DataError("0-1 upper bound outside [0, 1 - 1/k]");
    if (lower_bound && *lower_bound < -1e-9) throw DataError("negative 0-1 lower bound");
  }
}

TrainingProblem build_problem(const FitOptions& options, const LabeledDataset& train) {
  train.validate();
  if (!(options.s >= 0.0) || !std::isfinite(options.s)) throw UsageError("s must be finite and >= 0");
  TrainingProblem problem;
  auto [stats, x] = standardize(train.instances);
  problem.standardization = std::move(stats);
  const int k = train.num_classes();
  problem.feature_map = fit_map(options.map, x, k);
  problem.z = problem.feature_map.transform_rows(x);
  ObjectiveSpec& spec = problem.objective;
  spec.loss = options.loss;
  spec.k = k;
  spec.d_out = problem.feature_map.d_out;
  spec.candidates = make_candidates(problem.z, options.variant);
  spec.moments = estimate_moments(problem.z, train.labels, k, options.s);
  return problem;
}

MRCModel fit(const FitOptions& options, const LabeledDataset& train) {
  TrainingProblem problem = build_problem(options, train);
  const SolverResult solved = minimize(problem.objective, options.solver);

  MRCModel model;
  model.variant = options.variant;
  model.loss = options.loss;
  model.feature_map = problem.feature_map;
  model.standardization = problem.standardization;
  model.moments = problem.objective.moments;
  model.mu = solved.mu_star;
  model.class_labels = train.class_labels;
  model.upper_bound = solved.f_star;
  model.solver = {solved.backend, solved.iterations, solved.f_star};
  model.lower_bound = compute_lower(model, problem.objective, train.labels);
  model.validate();
  return model;
}

BoundReport recompute_bounds(const MRCModel& model, const LabeledDataset& train) {
  if (train.class_labels != model.class_labels) throw DataError("training classes differ from the model's");
  if (train.dims() != model.feature_map.d_in) throw DataError("dimension mismatch with the model");
  TrainingProblem problem;
  problem.standardization = model.standardization;
  problem.feature_map = model.feature_map;
  problem.z = model.feature_map.transform_rows(model.standardization.apply(train.instances));
  ObjectiveSpec& spec = problem.objective;
  spec.loss = model.loss;
  spec.k = model.num_classes();
  spec.d_out = model.feature_map.d_out;
  spec.candidates = make_candidates(problem.z, model.variant);
  spec.moments = model.moments;
  BoundReport report;
  report.upper_bound = objective_value(spec, model.mu);
  report.lower_bound = compute_lower(model, spec, train.labels);
  return report;
}

Matrix predict_proba(const MRCModel& model, const Matrix& x) {
  if (x.cols() != model.feature_map.d_in)
    throw DataError("dimension mismatch: model expects " + std::to_string(model.feature_map.d_in) +
                    " columns, got " + std::to_string(x.cols()));
  const RowMatrix z = model.feature_map.transform_rows(model.standardization.apply(x));
  const int k = model.num_classes();
  Matrix proba(x.rows(), k);
  for (Index i = 0; i < x.rows(); ++i)
    proba.row(i) = predict_proba_rule(model.loss, model.mu, z.row(i).transpose(), k).transpose();
  return proba;
}

std::vector<int> predict_indices(const MRCModel& model, const Matrix& x) {
  const Matrix proba = predict_proba(model, x);
  std::vector<int> out(static_cast<std::size_t>(proba.rows()));
  for (Index i = 0; i < proba.rows(); ++i) {
    Index best = 0;
    for (Index y = 1; y < proba.cols(); ++y)
      if (proba(i, y) > proba(i, best)) best = y;
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

std::vector<std::string> predict(const MRCModel& model, const Matrix& x) {
  return decode_labels(predict_indices(model, x), model.class_labels);
}

double get_upper_bound(const MRCModel& model) { return model.upper_bound; }

double get_lower_bound(const MRCModel& model) {
  if (model.variant != Variant::mrc || !model.lower_bound)
    throw UsageError("lower bound unavailable for CMRC");
  return *model.lower_bound;
}

Metrics evaluate(const MRCModel& model, const LabeledDataset& test) {
  if (test.class_labels != model.class_labels)
    throw DataError("test labels are not encoded with the model's classes");
  if (test.size() < 1) throw DataError("empty test set");
  const Matrix proba = predict_proba(model, test.instances);
  Metrics metrics;
  Index errors = 0;
  double log_loss = 0.0;
  double expected = 0.0;
  for (Index i = 0; i < proba.rows(); ++i) {
    const int truth = test.labels[static_cast<std::size_t>(i)];
    Index best = 0;
    for (Index y = 1; y < proba.cols(); ++y)
      if (proba(i, y) > proba(i, best)) best = y;
    if (best != truth) ++errors;
    double p = proba(i, truth);
    expected += 1.0 - p;
    if (p < kProbabilityFloor) {
      p = kProbabilityFloor;
      ++metrics.clamped;
    }
    log_loss -= std::log(p);
  }
  const double n = static_cast<double>(proba.rows());
  metrics.error_rate = static_cast<double>(errors) / n;
  metrics.mean_log_loss = log_loss / n;
  metrics.expected_01_loss = expected / n;
  return metrics;
}

}  // namespace mrc
