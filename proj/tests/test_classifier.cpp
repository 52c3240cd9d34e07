#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mrc/classifier.hpp"
#include "mrc/error.hpp"

using namespace mrc;

namespace {

FitOptions quick(Variant variant, Loss loss, MapKind kind = MapKind::linear) {
  FitOptions o;
  o.variant = variant;
  o.loss = loss;
  o.map.kind = kind;
  o.map.n_components = 20;
  o.solver.max_iters = 500;
  return o;
}

}  // namespace

TEST_CASE("fit produces a consistent model for every variant") {
  const LabeledDataset ds = gen_blobs(80, 3, 2, 2.0, 1);
  for (Variant variant : {Variant::mrc, Variant::cmrc}) {
    for (Loss loss : {Loss::zero_one, Loss::log}) {
      for (MapKind kind : {MapKind::linear, MapKind::fourier, MapKind::relu, MapKind::threshold}) {
        const MRCModel model = fit(quick(variant, loss, kind), ds);
        CHECK_NOTHROW(model.validate());
        CHECK(model.lower_bound.has_value() == (variant == Variant::mrc));
        if (model.lower_bound) CHECK(*model.lower_bound <= model.upper_bound + 1e-9);
        const Matrix p = predict_proba(model, ds.instances);
        CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
        const Metrics m = evaluate(model, ds);
        CHECK(m.error_rate < 0.4);
        CHECK(m.expected_01_loss >= 0.0);
      }
    }
  }
}

TEST_CASE("recomputed bounds match the fitted ones") {
  const LabeledDataset ds = gen_blobs(60, 2, 2, 1.5, 2);
  const MRCModel model = fit(quick(Variant::mrc, Loss::zero_one), ds);
  const BoundReport report = recompute_bounds(model, ds);
  CHECK(report.upper_bound == doctest::Approx(model.upper_bound).epsilon(1e-12));
  REQUIRE(report.lower_bound);
  CHECK(*report.lower_bound == doctest::Approx(*model.lower_bound).epsilon(1e-9));
  CHECK(get_lower_bound(model) == *model.lower_bound);
  const MRCModel cmrc = fit(quick(Variant::cmrc, Loss::log), ds);
  CHECK_THROWS_AS(get_lower_bound(cmrc), UsageError);
}

TEST_CASE("predict ties go to the smallest class index") {
  const LabeledDataset ds = gen_blobs(40, 2, 2, 1.0, 3);
  MRCModel model = fit(quick(Variant::mrc, Loss::log), ds);
  model.mu.setZero();
  const std::vector<std::string> labels = predict(model, ds.instances);
  for (const auto& l : labels) CHECK(l == ds.class_labels[0]);
}

TEST_CASE("evaluate checks class encoding and clamps probabilities") {
  const LabeledDataset ds = gen_blobs(40, 2, 2, 8.0, 4);
  MRCModel model = fit(quick(Variant::cmrc, Loss::zero_one), ds);
  LabeledDataset other = ds;
  other.class_labels = {"a", "b"};
  CHECK_THROWS_AS(evaluate(model, other), DataError);
  // well separated blobs: the 0-1 rule puts zero mass on some true labels
  const Metrics m = evaluate(model, ds);
  CHECK(std::isfinite(m.mean_log_loss));
  CHECK(m.mean_log_loss <= -std::log(1e-12) + 1e-9);
}

TEST_CASE("fit is deterministic") {
  const LabeledDataset ds = gen_blobs(60, 3, 3, 1.0, 5);
  FitOptions o = quick(Variant::mrc, Loss::zero_one, MapKind::fourier);
  o.map.seed = 9;
  const MRCModel a = fit(o, ds);
  const MRCModel b = fit(o, ds);
  CHECK(a.mu == b.mu);
  CHECK(predict_proba(a, ds.instances) == predict_proba(b, ds.instances));
}

TEST_CASE("fit argument checks") {
  const LabeledDataset ds = gen_blobs(20, 2, 2, 1.0, 6);
  FitOptions o = quick(Variant::mrc, Loss::zero_one);
  o.s = -1.0;
  CHECK_THROWS_AS(fit(o, ds), UsageError);
  const MRCModel model = fit(quick(Variant::mrc, Loss::zero_one), ds);
  CHECK_THROWS_AS(predict(model, Matrix::Zero(3, 5)), DataError);
}
