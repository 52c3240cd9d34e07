#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "mrc/error.hpp"
#include "mrc/model_io.hpp"

using namespace mrc;

namespace {

MRCModel fitted(MapKind kind, Variant variant = Variant::mrc) {
  const LabeledDataset ds = gen_blobs(50, 3, 2, 1.5, 8);
  FitOptions o;
  o.variant = variant;
  o.map.kind = kind;
  o.map.n_components = 15;
  o.solver.max_iters = 300;
  return fit(o, ds);
}

std::string to_text(const MRCModel& model) {
  std::ostringstream out;
  save_model(model, out);
  return out.str();
}

}  // namespace

TEST_CASE("save and load round trip bit for bit") {
  const Matrix probe = gen_blobs(50, 3, 2, 1.5, 99).instances;
  for (MapKind kind : {MapKind::linear, MapKind::fourier, MapKind::relu, MapKind::threshold}) {
    for (Variant variant : {Variant::mrc, Variant::cmrc}) {
      const MRCModel model = fitted(kind, variant);
      const auto path = test::tmp_path("model.mrc");
      save_model(model, path);
      const MRCModel back = load_model(path);
      CHECK(back.mu == model.mu);
      CHECK(back.lower_bound == model.lower_bound);
      CHECK(back.upper_bound == model.upper_bound);
      CHECK(predict_proba(back, probe) == predict_proba(model, probe));
      CHECK(to_text(back) == to_text(model));
    }
  }
}

TEST_CASE("load rejects bad files with distinct diagnostics") {
  const std::string text = to_text(fitted(MapKind::linear));
  auto load_text = [](const std::string& s) {
    std::istringstream in(s);
    return load_model(in);
  };

  std::string v99 = text;
  v99.replace(v99.find("format_version = 1"), 18, "format_version = 99");
  CHECK_THROWS_WITH_AS(load_text(v99), doctest::Contains("unsupported model format_version"), DataError);

  CHECK_THROWS_WITH_AS(load_text(text.substr(0, text.size() / 2)), doctest::Contains("corrupt model file"),
                       DataError);

  std::string bad_mu = text;
  bad_mu.replace(bad_mu.find("mu.size = "), 10, "mu.size = 9");
  CHECK_THROWS_WITH_AS(load_text(bad_mu), doctest::Contains("corrupt model file"), DataError);

  CHECK_THROWS_WITH_AS(load_model(test::tmp_path("nope.mrc")), doctest::Contains("cannot open"), DataError);
}

TEST_CASE("model files are diff friendly") {
  const std::string text = to_text(fitted(MapKind::linear));
  CHECK(text.rfind("# mrc model file\nformat_version = 1\n", 0) == 0);
  CHECK(text.find("upper_bound = 0x") != std::string::npos);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.substr(text.size() - 4) == "end\n");
}
