#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mrc/classifier.hpp"
#include "mrc/objective.hpp"
#include "mrc/random.hpp"

namespace mrc::test {

inline std::filesystem::path tmp_path(const std::string& name) {
  std::filesystem::path dir(MRC_TEST_TMP);
  std::filesystem::create_directories(dir);
  return dir / name;
}

inline Vector random_vector(Rng& rng, Index n, double scale = 1.0) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}

// Objective over random rows with a band that keeps the problem bounded.
inline ObjectiveSpec random_spec(Rng& rng, Index n, int k, Index d_out, Loss loss, Variant variant,
                                 double s = 0.5) {
  RowMatrix z(n, d_out);
  for (Index i = 0; i < n; ++i) {
    z(i, 0) = 1.0;
    for (Index j = 1; j < d_out; ++j) z(i, j) = rng.normal();
  }
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (auto& y : labels) y = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  ObjectiveSpec spec;
  spec.loss = loss;
  spec.k = k;
  spec.d_out = d_out;
  spec.candidates = make_candidates(z, variant);
  spec.moments = estimate_moments(z, labels, k, s);
  return spec;
}

// Brute force over all 2^k - 1 subsets. Among maximizers the smallest
// subset wins, then the lexicographically smallest class list.
inline SubsetChoice brute_best_subset(const std::vector<double>& v) {
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
    const bool better = !found || value > best.value ||
                        (value == best.value && (classes.size() < best.classes.size() ||
                                                 (classes.size() == best.classes.size() &&
                                                  classes < best.classes)));
    if (better) {
      best = {value, classes};
      found = true;
    }
  }
  return best;
}

}  // namespace mrc::test
