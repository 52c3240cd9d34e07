#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mrc/types.hpp"

namespace mrc {

/// Instances with labels encoded as indices into `class_labels`.
///
/// `class_labels` holds the original label strings sorted ascending; label
/// index c means `class_labels[c]`.
struct LabeledDataset {
  Matrix instances;  // n x d_in
  std::vector<int> labels;
  std::vector<std::string> class_labels;

  Index size() const { return instances.rows(); }
  Index dims() const { return instances.cols(); }
  int num_classes() const { return static_cast<int>(class_labels.size()); }

  /// Throws DataError when any LabeledDataset invariant is violated.
  void validate() const;
  LabeledDataset subset(const std::vector<Index>& rows) const;
};

/// Parsed CSV contents before label handling.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Load a labeled dataset; labels are encoded by ascending sort of the
/// distinct raw values. Requires at least two classes.
LabeledDataset load_csv(const std::filesystem::path& path, std::string_view label_column);

/// Load a dataset whose labels must come from a known class list (for
/// held-out data). Throws DataError on a label outside `class_labels`.
LabeledDataset load_csv_with_classes(const std::filesystem::path& path,
                                     std::string_view label_column,
                                     const std::vector<std::string>& class_labels);

/// Load instances only. When `label_column` is given and present it is dropped.
Matrix load_instances_csv(const std::filesystem::path& path,
                          std::optional<std::string_view> label_column);

void write_csv(const std::filesystem::path& path, const LabeledDataset& ds,
               std::string_view label_column = "y");

/// Encoding helpers; `encode_labels` fills `classes` with the sorted distinct values.
std::vector<int> encode_labels(const std::vector<std::string>& raw,
                               std::vector<std::string>& classes);
std::vector<std::string> decode_labels(const std::vector<int>& encoded,
                                       const std::vector<std::string>& classes);

/// Per-column affine normalization learned from training data.
struct StandardizationStats {
  Vector mean;
  Vector std;  // population convention; zero for constant columns

  /// (v - mean) / std per column; constant columns map to 0.
  Matrix apply(const Matrix& x) const;
  Vector apply_row(const Vector& x) const;
};

std::pair<StandardizationStats, Matrix> standardize(const Matrix& train);

/// Seeded permutation split. The test part gets floor(n * test_fraction)
/// rows clamped to [1, n - 1].
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds, double test_fraction,
                                                std::uint64_t seed);

/// Gaussian blobs. Sample i belongs to class i mod k; class c is centered at
/// distance `separation` from the origin along a fixed unit direction (angle
/// 2*pi*c/k in the first coordinate plane; +/- the first axis when d = 1) with
/// unit-variance spherical noise. Labels are zero-padded class numbers.
LabeledDataset gen_blobs(int n, int k, int d, double separation, std::uint64_t seed);

}  // namespace mrc
