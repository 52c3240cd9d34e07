#include "mrc/model_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "mrc/error.hpp"

namespace mrc {
namespace {

std::string format_real(double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%a ; %.17g", v, v);
  return buf;
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void text(const std::string& key, const std::string& value) { out_ << key << " = " << value << '\n'; }
  void integer(const std::string& key, long long value) { text(key, std::to_string(value)); }
  void real(const std::string& key, double value) { text(key, format_real(value)); }

  void vector(const std::string& key, const Vector& v) {
    integer(key + ".size", v.size());
    for (Index i = 0; i < v.size(); ++i) real(key + "[" + std::to_string(i) + "]", v[i]);
  }

  void matrix(const std::string& key, const Matrix& m) {
    integer(key + ".rows", m.rows());
    integer(key + ".cols", m.cols());
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j)
        real(key + "[" + std::to_string(i) + "," + std::to_string(j) + "]", m(i, j));
  }

 private:
  std::ostream& out_;
};

[[noreturn]] void corrupt(const std::string& what) { throw DataError("corrupt model file: " + what); }

class Reader {
 public:
  explicit Reader(std::istream& in) {
    std::string line;
    bool ended = false;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      if (line == "end") {
        ended = true;
        break;
      }
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) corrupt("malformed line '" + line + "'");
      if (!values_.emplace(line.substr(0, eq), line.substr(eq + 3)).second)
        corrupt("duplicate key '" + line.substr(0, eq) + "'");
    }
    if (!ended) corrupt("missing end marker (truncated?)");
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  const std::string& text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) corrupt("missing key '" + key + "'");
    return it->second;
  }

  long long integer(const std::string& key) const {
    const std::string& s = text(key);
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || errno != 0) corrupt("bad integer for '" + key + "'");
    return v;
  }

  double real(const std::string& key) const {
    std::string s = text(key);
    const auto semi = s.find(" ;");
    if (semi != std::string::npos) s.resize(semi);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') corrupt("bad real for '" + key + "'");
    return v;
  }

  Index size(const std::string& key, Index limit = Index{1} << 28) const {
    const long long v = integer(key);
    if (v < 0 || v > limit) corrupt("implausible size for '" + key + "'");
    return static_cast<Index>(v);
  }

  Vector vector(const std::string& key) const {
    const Index n = size(key + ".size");
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = real(key + "[" + std::to_string(i) + "]");
    return v;
  }

  Matrix matrix(const std::string& key) const {
    const Index rows = size(key + ".rows");
    const Index cols = size(key + ".cols");
    if (rows * cols > (Index{1} << 28)) corrupt("matrix '" + key + "' too large");
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j)
        m(i, j) = real(key + "[" + std::to_string(i) + "," + std::to_string(j) + "]");
    return m;
  }

 private:
  std::map<std::string, std::string> values_;
};

template <class Parse>
auto parse_enum(const Reader& r, const std::string& key, Parse parse) {
  try {
    return parse(r.text(key));
  } catch (const UsageError&) {
    corrupt("bad value for '" + key + "'");
  }
}

}  // namespace

void save_model(const MRCModel& model, std::ostream& out) {
  Writer w(out);
  out << "# mrc model file\n";
  w.integer("format_version", kModelFormatVersion);
  w.text("variant", to_string(model.variant));
  w.text("loss", to_string(model.loss));
  w.integer("classes.count", static_cast<long long>(model.class_labels.size()));
  for (std::size_t c = 0; c < model.class_labels.size(); ++c)
    w.text("classes[" + std::to_string(c) + "]", model.class_labels[c]);

  w.vector("standardization.mean", model.standardization.mean);
  w.vector("standardization.std", model.standardization.std);

  const FittedFeatureMap& map = model.feature_map;
  w.text("feature_map.kind", to_string(map.kind));
  w.integer("feature_map.d_in", map.d_in);
  w.integer("feature_map.d_out", map.d_out);
  w.integer("feature_map.k_classes", map.k_classes);
  w.real("feature_map.bandwidth", map.bandwidth);
  w.matrix("feature_map.weights", map.weights);
  w.vector("feature_map.offsets", map.offsets);
  w.integer("feature_map.thresholds.count", static_cast<long long>(map.thresholds.size()));
  for (std::size_t j = 0; j < map.thresholds.size(); ++j) {
    const auto& t = map.thresholds[j];
    w.vector("feature_map.thresholds[" + std::to_string(j) + "]",
             Eigen::Map<const Vector>(t.data(), static_cast<Index>(t.size())));
  }

  w.integer("moments.n", model.moments.n);
  w.real("moments.s", model.moments.s);
  w.vector("moments.tau", model.moments.tau);
  w.vector("moments.lambda", model.moments.lambda);
  w.vector("moments.sigma_hat", model.moments.sigma_hat);

  w.vector("mu", model.mu);
  w.real("upper_bound", model.upper_bound);
  if (model.lower_bound) {
    w.real("lower_bound", *model.lower_bound);
  } else {
    w.text("lower_bound", "none");
  }
  w.text("solver.backend", to_string(model.solver.backend));
  w.integer("solver.iterations", model.solver.iterations);
  w.real("solver.f_star", model.solver.f_star);
  out << "end\n";
}

void save_model(const MRCModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  save_model(model, out);
  out.flush();
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

MRCModel load_model(std::istream& in) {
  const Reader r(in);
  const long long version = r.integer("format_version");
  if (version != kModelFormatVersion)
    throw DataError("unsupported model format_version " + std::to_string(version) + " (expected " +
                    std::to_string(kModelFormatVersion) + ")");

  MRCModel model;
  model.variant = parse_enum(r, "variant", parse_variant);
  model.loss = parse_enum(r, "loss", parse_loss);
  const Index n_classes = r.size("classes.count", 1 << 20);
  for (Index c = 0; c < n_classes; ++c)
    model.class_labels.push_back(r.text("classes[" + std::to_string(c) + "]"));

  model.standardization.mean = r.vector("standardization.mean");
  model.standardization.std = r.vector("standardization.std");

  FittedFeatureMap& map = model.feature_map;
  map.kind = parse_enum(r, "feature_map.kind", parse_map_kind);
  map.d_in = r.size("feature_map.d_in");
  map.d_out = r.size("feature_map.d_out");
  map.k_classes = static_cast<int>(r.size("feature_map.k_classes", 1 << 20));
  map.bandwidth = r.real("feature_map.bandwidth");
  map.weights = r.matrix("feature_map.weights");
  map.offsets = r.vector("feature_map.offsets");
  const Index n_thr = r.size("feature_map.thresholds.count");
  for (Index j = 0; j < n_thr; ++j) {
    const Vector t = r.vector("feature_map.thresholds[" + std::to_string(j) + "]");
    map.thresholds.emplace_back(t.data(), t.data() + t.size());
  }

  model.moments.n = r.size("moments.n");
  model.moments.s = r.real("moments.s");
  model.moments.tau = r.vector("moments.tau");
  model.moments.lambda = r.vector("moments.lambda");
  model.moments.sigma_hat = r.vector("moments.sigma_hat");

  model.mu = r.vector("mu");
  model.upper_bound = r.real("upper_bound");
  if (r.text("lower_bound") != "none") model.lower_bound = r.real("lower_bound");
  model.solver.backend = parse_enum(r, "solver.backend", parse_backend);
  model.solver.iterations = static_cast<int>(r.size("solver.iterations", 1LL << 40));
  model.solver.f_star = r.real("solver.f_star");

  try {
    model.validate();
  } catch (const DataError& e) {
    corrupt(e.what());
  }
  return model;
}

MRCModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path.string() + "'");
  return load_model(in);
}

}  // namespace mrc
