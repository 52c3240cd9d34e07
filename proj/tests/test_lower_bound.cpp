#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "mrc/error.hpp"
#include "mrc/lower_bound.hpp"
#include "mrc/solver.hpp"

using namespace mrc;

namespace {

struct Instance {
  ObjectiveSpec spec;
  std::vector<int> labels;
};

Instance random_instance(Rng& rng, Index n, int k, Index d, Loss loss, double s) {
  RowMatrix z(n, d);
  for (Index i = 0; i < n; ++i) {
    z(i, 0) = 1.0;
    // a few repeated rows exercise the duplicate handling
    for (Index j = 1; j < d; ++j) z(i, j) = i % 5 == 4 ? z(i - 1, j) : rng.normal();
  }
  Instance inst;
  inst.labels.resize(static_cast<std::size_t>(n));
  for (auto& y : inst.labels) y = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  inst.spec.loss = loss;
  inst.spec.k = k;
  inst.spec.d_out = d;
  inst.spec.candidates = make_candidates(z, Variant::mrc);
  inst.spec.moments = estimate_moments(z, inst.labels, k, s);
  return inst;
}

}  // namespace

TEST_CASE("shifted and plain lower-bound programs agree") {
  Rng rng(31);
  for (Loss loss : {Loss::zero_one, Loss::log}) {
    for (int trial = 0; trial < 15; ++trial) {
      const Instance inst = random_instance(rng, 30, 3, 3, loss, 0.5);
      const Vector mu = test::random_vector(rng, inst.spec.dim(), 0.5);
      const double plain = lower_bound(inst.spec, mu);
      const double shifted = lower_bound(inst.spec, mu, inst.labels);
      CHECK(plain == doctest::Approx(shifted).epsilon(1e-8).scale(1.0));
      CHECK(shifted <= objective_value(inst.spec, mu) + 1e-9);
    }
  }
}

TEST_CASE("Bayes-risk program equals the exact minimax risk") {
  Rng rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + trial % 3;
    const Instance inst = random_instance(rng, 12, k, 3, Loss::zero_one, 0.3 * (trial % 4));
    const double exact = exact_minimize_01(inst.spec).f_star;
    CHECK(minimax_risk_01(inst.spec, LowerBoundForm::subsets) == doctest::Approx(exact).epsilon(1e-7));
    CHECK(minimax_risk_01(inst.spec, LowerBoundForm::epigraph) == doctest::Approx(exact).epsilon(1e-7));
  }
}

TEST_CASE("lower bound at the exact optimum never exceeds the minimax risk") {
  Rng rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance inst = random_instance(rng, 15, 3, 3, Loss::zero_one, 0.5);
    const SolverResult res = exact_minimize_01(inst.spec);
    const double lower = lower_bound(inst.spec, res.mu_star, inst.labels);
    CHECK(lower <= res.f_star + 1e-9);
    CHECK(lower >= -1e-9);
  }
}

TEST_CASE("zero band pins the distribution on tabular features") {
  // instance a: labels 0, 0; instance b: labels 1, 0 -> Bayes error 1/4
  RowMatrix z(4, 2);
  z << 1, 0, 1, 0, 0, 1, 0, 1;
  const std::vector<int> labels{0, 0, 1, 0};
  ObjectiveSpec spec;
  spec.k = 2;
  spec.d_out = 2;
  spec.candidates = make_candidates(z, Variant::mrc);
  spec.moments = estimate_moments(z, labels, 2, 0.0);
  CHECK(minimax_risk_01(spec) == doctest::Approx(0.25).epsilon(1e-12));
  const SolverResult res = exact_minimize_01(spec);
  CHECK(res.f_star == doctest::Approx(0.25).epsilon(1e-9));
  // with p fixed, the lower bound is the empirical loss of the rule
  const Matrix loss = rule_losses(spec, res.mu_star);
  const double empirical = (loss(0, 0) * 2 + loss(1, 1) + loss(1, 0)) / 4.0;
  CHECK(lower_bound(spec, res.mu_star, labels) == doctest::Approx(empirical).epsilon(1e-9));
}

TEST_CASE("lower bound argument checks") {
  Rng rng(34);
  Instance inst = random_instance(rng, 10, 2, 2, Loss::zero_one, 0.3);
  const Vector mu = Vector::Zero(inst.spec.dim());
  CHECK_THROWS_AS(lower_bound(inst.spec, mu, {0, 1}), DataError);
  CHECK_THROWS_AS(lower_bound(inst.spec, Vector::Zero(3)), UsageError);
  inst.spec.candidates.variant = Variant::cmrc;
  CHECK_THROWS_AS(lower_bound(inst.spec, mu), UsageError);
}
