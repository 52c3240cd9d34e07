// Acceptance checks. Prints one PASS/FAIL line per criterion followed by
// indented details. Exits 0 when every check ran to completion, whatever
// its verdict; --strict also turns a FAIL into exit status 1.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrc/classifier.hpp"
#include "mrc/lower_bound.hpp"
#include "mrc/model_io.hpp"
#include "mrc/objective.hpp"
#include "mrc/random.hpp"
#include "mrc/solver.hpp"

using namespace mrc;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ObjectiveSpec spec_from(const RowMatrix& z, const std::vector<int>& labels, int k, Loss loss,
                        Variant variant, double s) {
  ObjectiveSpec spec;
  spec.loss = loss;
  spec.k = k;
  spec.d_out = z.cols();
  spec.candidates = make_candidates(z, variant);
  spec.moments = estimate_moments(z, labels, k, s);
  return spec;
}

// 1 ------------------------------------------------------------------------
Verdict uniform_risk() {
  Rng rng(101);
  double worst = 0.0;
  for (int k : {2, 3, 5}) {
    RowMatrix z(20, 3);
    std::vector<int> labels(20);
    for (Index i = 0; i < 20; ++i) {
      z(i, 0) = 1.0;
      z(i, 1) = rng.normal();
      z(i, 2) = rng.normal();
      labels[static_cast<std::size_t>(i)] = static_cast<int>(i % k);
    }
    for (Variant variant : {Variant::mrc, Variant::cmrc}) {
      const auto zo = spec_from(z, labels, k, Loss::zero_one, variant, 0.3);
      const auto lg = spec_from(z, labels, k, Loss::log, variant, 0.3);
      const Vector zero = Vector::Zero(zo.dim());
      worst = std::max(worst, std::fabs(objective_value(zo, zero) - (1.0 - 1.0 / k)));
      worst = std::max(worst, std::fabs(objective_value(lg, zero) - std::log(double(k))));
    }
  }
  return {worst <= 1e-12, fmt("max deviation %.3g over k in {2,3,5}, both losses and variants", worst)};
}

// 2 ------------------------------------------------------------------------
SubsetChoice brute_best_subset(const std::vector<double>& v) {
  const int k = static_cast<int>(v.size());
  SubsetChoice best;
  bool found = false;
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<int> classes;
    double sum = 0.0;
    for (int y = 0; y < k; ++y)
      if (mask >> y & 1) {
        classes.push_back(y);
        sum += v[static_cast<std::size_t>(y)];
      }
    const double value = (sum - 1.0) / static_cast<double>(classes.size());
    if (!found || value > best.value ||
        (value == best.value && (classes.size() < best.classes.size() ||
                                 (classes.size() == best.classes.size() && classes < best.classes)))) {
      best = {value, classes};
      found = true;
    }
  }
  return best;
}

Verdict subset_oracle() {
  Rng rng(202);
  int mismatches = 0, ties = 0;
  for (int k = 2; k <= 8; ++k) {
    for (int trial = 0; trial < 1000; ++trial) {
      // every other vector sits on a quarter grid, where sums are exact and ties are common
      const bool grid = trial % 2 == 1;
      std::vector<double> v(static_cast<std::size_t>(k));
      for (auto& x : v) x = grid ? 0.25 * static_cast<double>(rng.below(9)) - 0.5 : rng.normal();
      const SubsetChoice got = best_subset(v);
      const SubsetChoice want = brute_best_subset(v);
      if (grid) {
        std::vector<double> sorted = v;
        std::sort(sorted.begin(), sorted.end());
        ties += std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
        mismatches += got.value != want.value || got.classes != want.classes;
      } else {
        mismatches += std::fabs(got.value - want.value) > 1e-12 || got.classes != want.classes;
      }
    }
  }
  return {mismatches == 0, fmt("%d mismatches in 7000 vectors (k = 2..8), %d vectors had tied scores", mismatches, ties)};
}

// 3 ------------------------------------------------------------------------
Verdict cross_backend() {
  // Instances come from a stream that was not used when choosing the step scale.
  Rng rng(derive_seed(3, 303));
  double worst_above = -1e9, worst_below = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int n = 10 + static_cast<int>(rng.below(31));
    const int k = 2 + static_cast<int>(rng.below(3));
    const int d = 1 + static_cast<int>(rng.below(4));  // d_out = 1 + d <= 5
    const LabeledDataset ds = gen_blobs(n, k, d, 1.0 + 2.0 * rng.uniform(), derive_seed(t, 33));
    FitOptions o;
    o.variant = t % 2 ? Variant::cmrc : Variant::mrc;
    o.s = 0.1 + rng.uniform();
    const TrainingProblem pr = build_problem(o, ds);
    const double exact = exact_minimize_01(pr.objective).f_star;
    SolverConfig c;
    c.max_iters = 30000;
    c.step_scale = 0.03;
    const double approx = nesterov_minimize(pr.objective, c).f_star;
    worst_above = std::max(worst_above, approx - exact);
    worst_below = std::max(worst_below, exact - approx);
  }
  return {worst_above <= 1e-3 && worst_below <= 1e-9,
          fmt("max f_nesterov - f_exact = %.3g, max undershoot = %.3g (30000 iterations, step scale 0.03)",
              worst_above, worst_below)};
}

// 4 ------------------------------------------------------------------------
Verdict bound_collapse() {
  std::string detail;
  bool pass = true;
  auto check = [&](const LabeledDataset& ds, double bayes, const char* name) {
    FitOptions o;
    o.map.kind = MapKind::threshold;
    o.map.n_thresholds = 16;
    o.s = 0.0;
    o.solver.backend = Backend::exact;
    const MRCModel m = fit(o, ds);
    const double lower = m.lower_bound.value_or(NAN);
    const bool ok = std::fabs(m.upper_bound - bayes) <= 1e-6 && std::fabs(lower - bayes) <= 1e-6;
    pass = pass && ok;
    detail += fmt("%s: upper %.9f lower %.9f Bayes error %.9f; ", name, m.upper_bound, lower, bayes);
  };
  {
    LabeledDataset ds;
    ds.instances = (Matrix(4, 1) << 0, 0, 1, 1).finished();
    ds.labels = {0, 0, 1, 0};
    ds.class_labels = {"a", "b"};
    check(ds, 0.25, "fixture");
  }
  {
    // 5 instance values x 3 classes
    Rng rng(404);
    LabeledDataset ds;
    ds.class_labels = {"0", "1", "2"};
    const int n = 60;
    ds.instances.resize(n, 1);
    int counts[5][3] = {};
    for (int i = 0; i < n; ++i) {
      const int x = i % 5;
      const int y = rng.uniform() < 0.6 ? x % 3 : static_cast<int>(rng.below(3));
      ds.instances(i, 0) = x;
      ds.labels.push_back(y);
      ++counts[x][y];
    }
    double correct = 0.0;
    for (auto& row : counts) correct += *std::max_element(row, row + 3);
    check(ds, 1.0 - correct / n, "random");
  }
  return {pass, "tabular threshold features, s = 0, exact backend. " + detail};
}

// 5, 6 ---------------------------------------------------------------------
struct BlobRuns {
  int bracket_fail = 0, upper_fail = 0, lower_fail = 0;
  std::vector<std::string> lower_cases;
  int randomized_ok = 0, argmax_ok = 0;
  double seconds5 = 0.0, seconds6 = 0.0;
};

BlobRuns blob_runs() {
  BlobRuns r;
  for (int seed = 1; seed <= 20; ++seed) {
    const LabeledDataset all = gen_blobs(1200, 2, 2, 1.0, static_cast<std::uint64_t>(seed));
    std::vector<Index> tr, te;
    for (Index i = 0; i < all.size(); ++i) (i < 200 ? tr : te).push_back(i);
    const LabeledDataset train = all.subset(tr), test = all.subset(te);
    double prev_upper = -1.0, prev_lower = 2.0, prev_s = 0.0;
    for (double s : {0.0, 0.3, 1.0, 3.0}) {
      const auto t0 = Clock::now();
      FitOptions o;
      o.s = s;
      const MRCModel m = fit(o, train);
      const double upper = m.upper_bound, lower = *m.lower_bound;
      r.bracket_fail += lower > upper + 1e-9;
      r.upper_fail += upper < prev_upper - 1e-6;
      if (lower > prev_lower + 1e-6) {
        ++r.lower_fail;
        r.lower_cases.push_back(
            fmt("seed %d: lower %.4f at s = %g exceeds %.4f at s = %g", seed, lower, s, prev_lower, prev_s));
      }
      prev_upper = upper;
      prev_lower = lower;
      prev_s = s;
      r.seconds5 += seconds_since(t0);
      if (s == 0.3) {
        const Metrics met = evaluate(m, test);
        r.randomized_ok += met.expected_01_loss <= upper + 0.05 && met.expected_01_loss >= lower - 0.05;
        r.argmax_ok += met.error_rate <= upper + 0.05 && met.error_rate >= lower - 0.05;
        r.seconds6 += seconds_since(t0);
      }
    }
  }
  return r;
}

// 7 ------------------------------------------------------------------------
Verdict logistic_equivalence() {
  const LabeledDataset ds = gen_blobs(100, 3, 2, 1.0, 707);
  FitOptions o;
  o.variant = Variant::cmrc;
  o.loss = Loss::log;
  o.s = 0.0;
  o.solver.max_iters = 20000;
  const TrainingProblem pr = build_problem(o, ds);
  const MRCModel m = fit(o, ds);
  // with lambda = 0 the objective is the average negative log-likelihood
  const double grad_norm = evaluate_objective(pr.objective, m.mu).subgradient.norm();

  const Matrix p = predict_proba(m, ds.instances);
  const int k = m.num_classes();
  const Eigen::Map<const Matrix> w(m.mu.data(), m.feature_map.d_out, k);
  bool identical = true;
  for (Index i = 0; i < ds.size(); ++i) {
    Vector z(1 + ds.dims());
    z[0] = 1.0;
    for (Index j = 0; j < ds.dims(); ++j)
      z[1 + j] = (ds.instances(i, j) - m.standardization.mean[j]) / m.standardization.std[j];
    const Vector scores = w.transpose() * z;
    // textbook max-shifted softmax with scalar std::exp
    std::vector<double> e(static_cast<std::size_t>(k));
    double total = 0.0;
    for (int y = 0; y < k; ++y) total += e[y] = std::exp(scores[y] - scores.maxCoeff());
    for (int y = 0; y < k; ++y) identical = identical && p(i, y) == e[y] / total;
  }
  return {grad_norm <= 1e-3 && identical,
          fmt("gradient norm of the mean NLL at mu_star %.3g; predict_proba %s softmax of the linear scores",
              grad_norm, identical ? "equals" : "differs from")};
}

// 8 ------------------------------------------------------------------------
Verdict kernel_approximation() {
  Rng rng(808);
  const Index d = 3;
  Matrix pts(20, d);
  for (Index i = 0; i < pts.size(); ++i) pts(i) = 0.7 * rng.normal();
  const double sigma = 1.0;
  double worst = 0.0;
  for (Index pair = 0; pair < 10; ++pair) {
    const Vector a = pts.row(2 * pair).transpose(), b = pts.row(2 * pair + 1).transpose();
    double mean = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      FeatureMapConfig config;
      config.kind = MapKind::fourier;
      config.n_components = 2000;
      config.bandwidth = sigma;
      config.seed = seed;
      const FittedFeatureMap map = fit_map(config, pts, 2);
      mean += map.transform(a).tail(2000).dot(map.transform(b).tail(2000)) / 20.0;
    }
    const double kernel = std::exp(-(a - b).squaredNorm() / (2 * sigma * sigma));
    worst = std::max(worst, std::fabs(mean - kernel));
  }
  return {worst <= 0.05, fmt("max |mean z'z' - k(x, x')| = %.4f over 10 pairs, D = 2000, 20 seeds", worst)};
}

// 9 ------------------------------------------------------------------------
Verdict determinism() {
  const LabeledDataset ds = gen_blobs(300, 3, 4, 1.5, 909);
  FitOptions o;
  o.map.kind = MapKind::fourier;
  o.map.n_components = 100;
  o.map.seed = 9;
  o.solver.max_iters = 2000;
  const MRCModel a = fit(o, ds), b = fit(o, ds);
  std::ostringstream ta, tb;
  save_model(a, ta);
  save_model(b, tb);
  const bool same_model = ta.str() == tb.str();
  const bool same_pred = predict_proba(a, ds.instances) == predict_proba(b, ds.instances);
  std::istringstream in(ta.str());
  const MRCModel back = load_model(in);
  const bool round_trip = predict_proba(back, ds.instances) == predict_proba(a, ds.instances) &&
                          predict(back, ds.instances) == predict(a, ds.instances);
  std::string detail = std::string("model files ") + (same_model ? "identical" : "differ") + ", predictions " +
                       (same_pred ? "identical" : "differ") + ", reloaded predictions " +
                       (round_trip ? "identical" : "differ");
  return {same_model && same_pred && round_trip, detail};
}

// 10 -----------------------------------------------------------------------
Verdict desk_runtime() {
  const LabeledDataset ds = gen_blobs(1000, 2, 20, 1.0, 1010);
  std::string detail;
  bool pass = true;
  for (Variant variant : {Variant::mrc, Variant::cmrc})
    for (Loss loss : {Loss::zero_one, Loss::log}) {
      FitOptions o;
      o.variant = variant;
      o.loss = loss;
      o.map.kind = MapKind::fourier;
      o.map.n_components = 500;
      o.solver.max_iters = 10000;
      const auto t0 = Clock::now();
      const MRCModel m = fit(o, ds);
      const double t = seconds_since(t0);
      pass = pass && t < 30.0;
      detail += fmt("%s %s %.1f s (upper %.4f); ", to_string(variant), to_string(loss), t, m.upper_bound);
    }
  return {pass, detail + "n = 1000, d_in = 20, fourier D = 500, 10000 iterations, bounds included"};
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  bool all_pass = true;
  bool crashed = false;
  auto report = [&](int id, double budget, const std::function<Verdict()>& check) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
      crashed = true;
    }
    const double t = seconds_since(t0);
    if (budget > 0 && t >= budget) {
      v.pass = false;
      v.detail += fmt(" [over the %g s budget]", budget);
    }
    all_pass = all_pass && v.pass;
    std::printf("ACC %d %s  (%.1f s)\n    %s\n", id, v.pass ? "PASS" : "FAIL", t, v.detail.c_str());
    std::fflush(stdout);
  };

  report(1, 1.0, uniform_risk);
  report(2, 1.0, subset_oracle);
  report(3, 30.0, cross_backend);
  report(4, 1.0, bound_collapse);

  BlobRuns runs;
  bool blobs_ok = true;
  std::string blob_error;
  try {
    runs = blob_runs();
  } catch (const std::exception& e) {
    blobs_ok = false;
    blob_error = e.what();
  }
  report(5, 0.0, [&] {
    if (!blobs_ok) throw std::runtime_error(blob_error);
    std::string detail = fmt("20 seeds x s in {0, 0.3, 1, 3}: lower > upper %d times; upper decreasing %d times; "
                             "lower increasing %d times; fits took %.1f s",
                             runs.bracket_fail, runs.upper_fail, runs.lower_fail, runs.seconds5);
    for (const auto& c : runs.lower_cases) detail += "\n    " + c;
    const bool pass = runs.bracket_fail == 0 && runs.upper_fail == 0 && runs.lower_fail == 0 && runs.seconds5 < 60;
    return Verdict{pass, detail};
  });
  report(6, 0.0, [&] {
    if (!blobs_ok) throw std::runtime_error(blob_error);
    return Verdict{runs.randomized_ok >= 18 && runs.seconds6 < 60,
                   fmt("test 0-1 loss of the randomized rule within [lower - 0.05, upper + 0.05] in %d/20 runs "
                       "(argmax predictions: %d/20); fits took %.1f s",
                       runs.randomized_ok, runs.argmax_ok, runs.seconds6)};
  });
  report(7, 10.0, logistic_equivalence);
  report(8, 10.0, kernel_approximation);
  report(9, 5.0, determinism);
  report(10, 0.0, desk_runtime);

  std::printf("%s\n", all_pass ? "all criteria pass" : "some criteria FAIL (see above)");
  if (crashed) return 2;
  return strict && !all_pass ? 1 : 0;
}
