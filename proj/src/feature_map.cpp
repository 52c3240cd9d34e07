#include "mrc/feature_map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mrc/error.hpp"
#include "mrc/random.hpp"

namespace mrc {
namespace {

constexpr std::size_t kBandwidthSample = 500;

std::vector<double> column_thresholds(const Matrix& x, Index col, int n_thresholds) {
  std::vector<double> values(x.col(col).data(), x.col(col).data() + x.rows());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.size() < 2) return {};

  std::vector<double> midpoints(values.size() - 1);
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    midpoints[i] = 0.5 * (values[i] + values[i + 1]);
  if (midpoints.size() <= static_cast<std::size_t>(n_thresholds)) return midpoints;

  // Evenly spaced quantile positions over the midpoint list.
  const double last = static_cast<double>(midpoints.size() - 1);
  std::vector<double> picked;
  for (int j = 0; j < n_thresholds; ++j) {
    const double q = static_cast<double>(j + 1) / (n_thresholds + 1);
    const auto idx = static_cast<std::size_t>(std::floor(q * last + 0.5));
    if (picked.empty() || picked.back() != midpoints[idx]) picked.push_back(midpoints[idx]);
  }
  return picked;
}

}  // namespace

const char* to_string(MapKind kind) {
  switch (kind) {
    case MapKind::linear: return "linear";
    case MapKind::fourier: return "fourier";
    case MapKind::relu: return "relu";
    case MapKind::threshold: return "threshold";
  }
  return "?";
}

MapKind parse_map_kind(const std::string& s) {
  if (s == "linear") return MapKind::linear;
  if (s == "fourier") return MapKind::fourier;
  if (s == "relu") return MapKind::relu;
  if (s == "threshold") return MapKind::threshold;
  throw UsageError("unknown feature map '" + s + "' (expected linear, fourier, relu or threshold)");
}

void FeatureMapConfig::validate() const {
  if ((kind == MapKind::fourier || kind == MapKind::relu) && n_components < 1)
    throw UsageError("n_components must be positive");
  if (kind == MapKind::fourier && bandwidth && !(*bandwidth > 0.0 && std::isfinite(*bandwidth)))
    throw UsageError("bandwidth must be a positive finite number");
  if (kind == MapKind::threshold && n_thresholds < 1)
    throw UsageError("n_thresholds must be positive");
}

double median_bandwidth(const Matrix& x, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<Index> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<Index>(i);
  if (n > kBandwidthSample) {
    Rng rng(derive_seed(seed, 0x3ed1));
    for (std::size_t i = 0; i < kBandwidthSample; ++i)
      std::swap(rows[i], rows[i + rng.below(n - i)]);
    rows.resize(kBandwidthSample);
  }
  std::vector<double> dists;
  dists.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = a + 1; b < rows.size(); ++b)
      dists.push_back((x.row(rows[a]) - x.row(rows[b])).norm());
  if (dists.empty()) return 1.0;

  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid), dists.end());
  double median = dists[mid];
  if (dists.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(dists.begin(),
                                               dists.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return median > 0.0 ? median : 1.0;
}

FittedFeatureMap fit_map(const FeatureMapConfig& config, const Matrix& x, int k_classes) {
  config.validate();
  if (x.rows() < 1 || x.cols() < 1) throw DataError("cannot fit a feature map on empty data");
  if (!x.allFinite()) throw DataError("non-finite entries in feature map training data");
  if (k_classes < 2) throw UsageError("feature map needs at least two classes");

  FittedFeatureMap map;
  map.kind = config.kind;
  map.d_in = x.cols();
  map.k_classes = k_classes;
  const Index dim = config.n_components;

  switch (config.kind) {
    case MapKind::linear:
      map.d_out = 1 + map.d_in;
      break;
    case MapKind::fourier: {
      map.bandwidth = config.bandwidth ? *config.bandwidth : median_bandwidth(x, config.seed);
      Rng rng(derive_seed(config.seed, 0xf0f0));
      map.weights.resize(dim, map.d_in);
      for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < map.d_in; ++j) map.weights(i, j) = rng.normal() / map.bandwidth;
      map.offsets.resize(dim);
      for (Index i = 0; i < dim; ++i) map.offsets[i] = 2.0 * std::numbers::pi * rng.uniform();
      map.d_out = 1 + dim;
      break;
    }
    case MapKind::relu: {
      Rng rng(derive_seed(config.seed, 0x4e1a));
      map.weights.resize(dim, map.d_in + 1);
      for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j <= map.d_in; ++j) map.weights(i, j) = rng.normal();
      map.d_out = 1 + dim;
      break;
    }
    case MapKind::threshold: {
      map.d_out = 1;
      for (Index j = 0; j < map.d_in; ++j) {
        map.thresholds.push_back(column_thresholds(x, j, config.n_thresholds));
        map.d_out += static_cast<Index>(map.thresholds.back().size());
      }
      break;
    }
  }
  return map;
}

void FittedFeatureMap::validate() const {
  if (d_in < 1 || k_classes < 2) throw DataError("feature map has invalid dimensions");
  switch (kind) {
    case MapKind::linear:
      if (d_out != 1 + d_in) throw DataError("linear map output dimension mismatch");
      break;
    case MapKind::fourier:
      if (weights.cols() != d_in || offsets.size() != weights.rows() || d_out != 1 + weights.rows() ||
          !(bandwidth > 0.0))
        throw DataError("fourier map parameters inconsistent");
      break;
    case MapKind::relu:
      if (weights.cols() != d_in + 1 || d_out != 1 + weights.rows())
        throw DataError("relu map parameters inconsistent");
      break;
    case MapKind::threshold: {
      if (static_cast<Index>(thresholds.size()) != d_in)
        throw DataError("threshold map parameters inconsistent");
      Index total = 1;
      for (const auto& t : thresholds) {
        if (!std::is_sorted(t.begin(), t.end())) throw DataError("thresholds not sorted");
        total += static_cast<Index>(t.size());
      }
      if (total != d_out) throw DataError("threshold map output dimension mismatch");
      break;
    }
  }
  if (!weights.allFinite() || !offsets.allFinite()) throw DataError("non-finite map parameters");
}

Vector FittedFeatureMap::transform(const Vector& x) const {
  if (x.size() != d_in)
    throw DataError("dimension mismatch: map expects " + std::to_string(d_in) + " inputs, got " +
                    std::to_string(x.size()));
  if (!x.allFinite()) throw DataError("non-finite instance");
  Vector z(d_out);
  z[0] = 1.0;
  switch (kind) {
    case MapKind::linear:
      z.tail(d_in) = x;
      break;
    case MapKind::fourier: {
      const double scale = std::sqrt(2.0 / static_cast<double>(weights.rows()));
      z.tail(weights.rows()) = scale * (weights * x + offsets).array().cos();
      break;
    }
    case MapKind::relu: {
      const double scale = std::sqrt(2.0 / static_cast<double>(weights.rows()));
      Vector pre = weights.leftCols(d_in) * x + weights.col(d_in);
      z.tail(weights.rows()) = scale * pre.array().max(0.0);
      break;
    }
    case MapKind::threshold: {
      Index out = 1;
      for (Index j = 0; j < d_in; ++j)
        for (double t : thresholds[static_cast<std::size_t>(j)]) z[out++] = x[j] <= t ? 1.0 : 0.0;
      break;
    }
  }
  return z;
}

RowMatrix FittedFeatureMap::transform_rows(const Matrix& x) const {
  if (x.cols() != d_in)
    throw DataError("dimension mismatch: map expects " + std::to_string(d_in) + " inputs, got " +
                    std::to_string(x.cols()));
  RowMatrix z(x.rows(), d_out);
  for (Index i = 0; i < x.rows(); ++i) z.row(i) = transform(x.row(i).transpose()).transpose();
  return z;
}

Vector label_cross(const Vector& z, int y, int k) {
  if (y < 0 || y >= k) throw UsageError("class index " + std::to_string(y) + " out of range");
  Vector phi = Vector::Zero(static_cast<Index>(k) * z.size());
  phi.segment(static_cast<Index>(y) * z.size(), z.size()) = z;
  return phi;
}

}  // namespace mrc
