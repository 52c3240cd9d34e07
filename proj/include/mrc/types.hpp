#pragma once

#include <string>

#include <Eigen/Dense>

namespace mrc {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Instance-major storage: one transformed instance per row.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Variant { mrc, cmrc };
enum class Loss { zero_one, log };

// Selects the OpenMP kernels or the plain-loop reference used in tests.
enum class Exec { parallel, serial };

const char* to_string(Variant v);
const char* to_string(Loss l);
Variant parse_variant(const std::string& s);
Loss parse_loss(const std::string& s);

}  // namespace mrc
