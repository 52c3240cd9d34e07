#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "mrc/error.hpp"
#include "mrc/solver.hpp"

using namespace mrc;

TEST_CASE("nesterov returns its best evaluated point") {
  Rng rng(41);
  for (Loss loss : {Loss::zero_one, Loss::log}) {
    for (Variant variant : {Variant::mrc, Variant::cmrc}) {
      const ObjectiveSpec spec = test::random_spec(rng, 40, 3, 3, loss, variant);
      SolverConfig config;
      config.max_iters = 300;
      config.record_history = true;
      const SolverResult res = nesterov_minimize(spec, config);
      REQUIRE(!res.objective_history.empty());
      CHECK(res.f_star == *std::min_element(res.objective_history.begin(), res.objective_history.end()));
      CHECK(res.f_star == objective_value(spec, res.mu_star));
      CHECK(res.f_star <= objective_value(spec, Vector::Zero(spec.dim())));
      CHECK(res.iterations == 300);
    }
  }
}

TEST_CASE("nesterov approaches the exact optimum") {
  Rng rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    const ObjectiveSpec spec = test::random_spec(rng, 20, 3, 3, Loss::zero_one, Variant::mrc);
    const double exact = exact_minimize_01(spec).f_star;
    SolverConfig config;
    config.max_iters = 20000;
    config.step_scale = 0.03;
    const double approx = nesterov_minimize(spec, config).f_star;
    CHECK(approx >= exact - 1e-9);
    CHECK(approx <= exact + 5e-3);
  }
}

TEST_CASE("exact backend optimum is attained by its mu") {
  Rng rng(43);
  for (Variant variant : {Variant::mrc, Variant::cmrc}) {
    const ObjectiveSpec spec = test::random_spec(rng, 15, 4, 3, Loss::zero_one, variant);
    const SolverResult res = exact_minimize_01(spec);
    CHECK(res.backend == Backend::exact);
    CHECK(res.f_star == doctest::Approx(objective_value(spec, res.mu_star)).epsilon(1e-9));
    // no random point does better
    for (int trial = 0; trial < 50; ++trial)
      CHECK(objective_value(spec, test::random_vector(rng, spec.dim())) >= res.f_star - 1e-9);
  }
}

TEST_CASE("solver determinism and input checks") {
  Rng rng(44);
  const ObjectiveSpec spec = test::random_spec(rng, 30, 3, 3, Loss::log, Variant::mrc);
  SolverConfig config;
  config.max_iters = 200;
  const SolverResult a = minimize(spec, config);
  const SolverResult b = minimize(spec, config);
  CHECK(a.mu_star == b.mu_star);
  config.exec = Exec::serial;
  CHECK((minimize(spec, config).mu_star - a.mu_star).cwiseAbs().maxCoeff() <= 1e-8);

  SolverConfig bad;
  bad.max_iters = 0;
  CHECK_THROWS_AS(nesterov_minimize(spec, bad), UsageError);
  SolverConfig exact;
  exact.backend = Backend::exact;
  CHECK_THROWS_AS(minimize(spec, exact), UsageError);  // log loss has no LP form
  CHECK(parse_backend("exact") == Backend::exact);
  CHECK_THROWS_AS(parse_backend("simplex"), UsageError);
}
