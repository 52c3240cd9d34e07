#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrc/types.hpp"

namespace mrc {

enum class MapKind { linear, fourier, relu, threshold };

const char* to_string(MapKind kind);
MapKind parse_map_kind(const std::string& s);

struct FeatureMapConfig {
  MapKind kind = MapKind::linear;
  int n_components = 100;           // D, fourier and relu
  std::optional<double> bandwidth;  // sigma for fourier; empty selects the median heuristic
  int n_thresholds = 10;            // per input dimension, threshold
  std::uint64_t seed = 0;

  void validate() const;
};

/// Frozen parameters of an instance feature map z(x).
///
/// Every map prepends a constant 1 so that the per-class blocks of Phi(x, y)
/// carry an intercept. Adding a new kind means a MapKind value, a branch in
/// fit_map and transform, and its fields in the model file.
struct FittedFeatureMap {
  MapKind kind = MapKind::linear;
  Index d_in = 0;
  Index d_out = 0;
  int k_classes = 0;
  Matrix weights;  // fourier: D x d_in, relu: D x (d_in + 1)
  Vector offsets;  // fourier: D
  double bandwidth = 0.0;  // fourier sigma actually used
  std::vector<std::vector<double>> thresholds;  // threshold: per input dimension, ascending

  /// z(x) for one instance.
  Vector transform(const Vector& x) const;
  /// z(x) for every row of `x`, one output row per instance.
  RowMatrix transform_rows(const Matrix& x) const;

  /// Throws DataError when the stored parameters are inconsistent.
  void validate() const;
};

FittedFeatureMap fit_map(const FeatureMapConfig& config, const Matrix& x, int k_classes);

/// Median pairwise Euclidean distance over at most 500 seeded-subsampled rows; 1 if zero.
double median_bandwidth(const Matrix& x, std::uint64_t seed);

/// Phi(x, y) = e_y (x) z: z placed in block y of k contiguous blocks.
Vector label_cross(const Vector& z, int y, int k);

}  // namespace mrc
