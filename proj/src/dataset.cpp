#include "mrc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "mrc/error.hpp"
#include "mrc/random.hpp"

namespace mrc {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw DataError("non-numeric cell '" + cell + "' at data row " + std::to_string(row + 1) +
                    ", column '" + column + "'");
  }
  return value;
}

std::optional<std::size_t> find_column(const CsvTable& table, std::string_view name) {
  const auto it = std::find(table.header.begin(), table.header.end(), name);
  if (it == table.header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - table.header.begin());
}

Matrix numeric_block(const CsvTable& table, std::optional<std::size_t> skip) {
  const Index n = static_cast<Index>(table.rows.size());
  const Index d = static_cast<Index>(table.header.size()) - (skip ? 1 : 0);
  if (n < 1) throw DataError("no data rows");
  if (d < 1) throw DataError("no instance columns");
  Matrix x(n, d);
  for (Index i = 0; i < n; ++i) {
    Index j = 0;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (skip && c == *skip) continue;
      x(i, j++) = parse_cell(table.rows[i][c], static_cast<std::size_t>(i), table.header[c]);
    }
  }
  return x;
}

std::vector<std::string> label_cells(const CsvTable& table, std::size_t column) {
  std::vector<std::string> raw;
  raw.reserve(table.rows.size());
  for (const auto& row : table.rows) raw.push_back(row[column]);
  return raw;
}

std::size_t require_column(const CsvTable& table, std::string_view name) {
  const auto col = find_column(table, name);
  if (!col) throw DataError("missing label column '" + std::string(name) + "'");
  return *col;
}

}  // namespace

void LabeledDataset::validate() const {
  if (instances.rows() < 1 || instances.cols() < 1) throw DataError("dataset must be non-empty");
  if (static_cast<Index>(labels.size()) != instances.rows())
    throw DataError("label count does not match instance count");
  if (class_labels.size() < 2) throw DataError("fewer than two classes");
  if (std::set<std::string>(class_labels.begin(), class_labels.end()).size() !=
      class_labels.size())
    throw DataError("duplicate class label");
  for (int y : labels) {
    if (y < 0 || y >= num_classes()) throw DataError("label index out of range");
  }
}

LabeledDataset LabeledDataset::subset(const std::vector<Index>& rows) const {
  LabeledDataset out;
  out.instances.resize(static_cast<Index>(rows.size()), dims());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.instances.row(static_cast<Index>(i)) = instances.row(rows[i]);
    out.labels.push_back(labels[rows[i]]);
  }
  out.class_labels = class_labels;
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file '" + path.string() + "'");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw DataError("missing header row in '" + path.string() + "'");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  table.header = split_line(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != table.header.size()) {
      throw DataError("line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

std::vector<int> encode_labels(const std::vector<std::string>& raw,
                               std::vector<std::string>& classes) {
  std::set<std::string> distinct(raw.begin(), raw.end());
  classes.assign(distinct.begin(), distinct.end());
  std::map<std::string, int> index;
  for (std::size_t c = 0; c < classes.size(); ++c) index[classes[c]] = static_cast<int>(c);
  std::vector<int> encoded;
  encoded.reserve(raw.size());
  for (const auto& r : raw) encoded.push_back(index.at(r));
  return encoded;
}

std::vector<std::string> decode_labels(const std::vector<int>& encoded,
                                       const std::vector<std::string>& classes) {
  std::vector<std::string> raw;
  raw.reserve(encoded.size());
  for (int y : encoded) raw.push_back(classes.at(static_cast<std::size_t>(y)));
  return raw;
}

LabeledDataset load_csv(const std::filesystem::path& path, std::string_view label_column) {
  const CsvTable table = read_csv(path);
  const std::size_t label_col = require_column(table, label_column);
  LabeledDataset ds;
  ds.instances = numeric_block(table, label_col);
  ds.labels = encode_labels(label_cells(table, label_col), ds.class_labels);
  if (ds.class_labels.size() < 2) throw DataError("fewer than two classes in '" + path.string() + "'");
  return ds;
}

LabeledDataset load_csv_with_classes(const std::filesystem::path& path,
                                     std::string_view label_column,
                                     const std::vector<std::string>& class_labels) {
  const CsvTable table = read_csv(path);
  const std::size_t label_col = require_column(table, label_column);
  LabeledDataset ds;
  ds.instances = numeric_block(table, label_col);
  ds.class_labels = class_labels;
  for (const auto& raw : label_cells(table, label_col)) {
    const auto it = std::find(class_labels.begin(), class_labels.end(), raw);
    if (it == class_labels.end()) throw DataError("unseen class label '" + raw + "'");
    ds.labels.push_back(static_cast<int>(it - class_labels.begin()));
  }
  return ds;
}

Matrix load_instances_csv(const std::filesystem::path& path,
                          std::optional<std::string_view> label_column) {
  const CsvTable table = read_csv(path);
  std::optional<std::size_t> skip;
  if (label_column) skip = find_column(table, *label_column);
  return numeric_block(table, skip);
}

void write_csv(const std::filesystem::path& path, const LabeledDataset& ds,
               std::string_view label_column) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file '" + path.string() + "'");
  for (Index j = 0; j < ds.dims(); ++j) out << 'x' << j << ',';
  out << label_column << '\n';
  char buf[32];
  for (Index i = 0; i < ds.size(); ++i) {
    for (Index j = 0; j < ds.dims(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", ds.instances(i, j));
      out << buf << ',';
    }
    out << ds.class_labels[static_cast<std::size_t>(ds.labels[i])] << '\n';
  }
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

Matrix StandardizationStats::apply(const Matrix& x) const {
  if (x.cols() != mean.size())
    throw DataError("dimension mismatch: expected " + std::to_string(mean.size()) +
                    " columns, got " + std::to_string(x.cols()));
  Matrix out(x.rows(), x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    if (std[j] > 0.0) {
      out.col(j) = (x.col(j).array() - mean[j]) / std[j];
    } else {
      out.col(j).setZero();
    }
  }
  return out;
}

Vector StandardizationStats::apply_row(const Vector& x) const {
  Matrix row = x.transpose();
  return apply(row).row(0).transpose();
}

std::pair<StandardizationStats, Matrix> standardize(const Matrix& train) {
  if (train.rows() < 1) throw DataError("cannot standardize an empty matrix");
  StandardizationStats stats;
  const double n = static_cast<double>(train.rows());
  stats.mean = train.colwise().mean().transpose();
  stats.std.resize(train.cols());
  for (Index j = 0; j < train.cols(); ++j) {
    const double var = (train.col(j).array() - stats.mean[j]).square().sum() / n;
    stats.std[j] = std::sqrt(var);
  }
  Matrix transformed = stats.apply(train);
  return {std::move(stats), std::move(transformed)};
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds, double test_fraction,
                                                std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw UsageError("test fraction must lie in (0, 1)");
  const Index n = ds.size();
  if (n < 2) throw DataError("need at least two rows to split");
  Index n_test = static_cast<Index>(std::floor(static_cast<double>(n) * test_fraction));
  n_test = std::clamp<Index>(n_test, 1, n - 1);

  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(derive_seed(seed, 0x5711));
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }
  std::vector<Index> test_rows(order.begin(), order.begin() + n_test);
  std::vector<Index> train_rows(order.begin() + n_test, order.end());
  return {ds.subset(train_rows), ds.subset(test_rows)};
}

LabeledDataset gen_blobs(int n, int k, int d, double separation, std::uint64_t seed) {
  if (k < 2 || n < k || d < 1) throw UsageError("gen_blobs requires n >= k >= 2 and d >= 1");
  if (!std::isfinite(separation)) throw UsageError("separation must be finite");

  Matrix centers = Matrix::Zero(k, d);
  for (int c = 0; c < k; ++c) {
    if (d == 1) {
      centers(c, 0) = (c % 2 == 0 ? 1.0 : -1.0) * separation;
    } else {
      const double angle = 2.0 * std::numbers::pi * c / k;
      centers(c, 0) = separation * std::cos(angle);
      centers(c, 1) = separation * std::sin(angle);
    }
  }

  const int width = static_cast<int>(std::to_string(k - 1).size());
  LabeledDataset ds;
  for (int c = 0; c < k; ++c) {
    std::string label = std::to_string(c);
    ds.class_labels.push_back(std::string(static_cast<std::size_t>(width) - label.size(), '0') +
                              label);
  }
  ds.instances.resize(n, d);
  ds.labels.resize(static_cast<std::size_t>(n));
  Rng rng(derive_seed(seed, 0xb10b));
  for (int i = 0; i < n; ++i) {
    const int c = i % k;
    ds.labels[static_cast<std::size_t>(i)] = c;
    for (int j = 0; j < d; ++j) ds.instances(i, j) = centers(c, j) + rng.normal();
  }
  return ds;
}

}  // namespace mrc
