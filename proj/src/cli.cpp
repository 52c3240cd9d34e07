#include "mrc/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrc/classifier.hpp"
#include "mrc/error.hpp"
#include "mrc/model_io.hpp"

namespace mrc {
namespace {

using json = nlohmann::ordered_json;

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Flags shared by train and benchmark.
struct ModelFlags {
  std::string variant = "mrc";
  std::string loss = "0-1";
  std::string phi = "linear";
  int n_components = 100;
  std::string sigma = "median";
  int n_thresholds = 10;
  double s = 0.3;
  std::string solver = "nesterov";
  int max_iters = 10000;
  std::uint64_t seed = 0;

  void add_model_options(CLI::App& app, bool with_grid_axes) {
    if (!with_grid_axes) {
      app.add_option("--variant", variant, "mrc or cmrc")->capture_default_str();
      app.add_option("--loss", loss, "0-1 or log")->capture_default_str();
      app.add_option("--phi", phi, "linear, fourier, relu or threshold")->capture_default_str();
      app.add_option("--s", s, "band scale: lambda = s * sigma / sqrt(n)")->capture_default_str();
    }
    app.add_option("--n-components", n_components, "D for fourier and relu maps")->capture_default_str();
    app.add_option("--sigma", sigma, "fourier bandwidth, a number or 'median'")->capture_default_str();
    app.add_option("--n-thresholds", n_thresholds, "thresholds per input column")->capture_default_str();
    app.add_option("--solver", solver, "nesterov or exact")->capture_default_str();
    app.add_option("--max-iters", max_iters, "nesterov iterations")->capture_default_str();
    app.add_option("--seed", seed, "seed for maps, splits and the solver")->capture_default_str();
  }

  FitOptions options() const {
    FitOptions o;
    o.variant = parse_variant(variant);
    o.loss = parse_loss(loss);
    o.s = s;
    o.map.kind = parse_map_kind(phi);
    o.map.n_components = n_components;
    o.map.n_thresholds = n_thresholds;
    o.map.seed = seed;
    if (sigma != "median") {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(sigma, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != sigma.size()) throw UsageError("--sigma must be a number or 'median'");
      o.map.bandwidth = value;
    }
    o.solver.backend = parse_backend(solver);
    o.solver.max_iters = max_iters;
    o.solver.seed = seed;
    o.map.validate();
    o.solver.validate();
    return o;
  }
};

json bound_or_null(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void print_block(std::ostream& out, const json& report) {
  out << "--- report (json) ---\n" << report.dump(2) << "\n--- end report ---\n";
}

std::string objective_label(const MRCModel& model) {
  return model.upper_is_risk_bound() ? "worst-case expected loss (risk bound)" : "not a risk bound";
}

json metrics_json(const Metrics& m) {
  return {{"error_rate", m.error_rate},
          {"expected_01_loss", m.expected_01_loss},
          {"mean_log_loss", m.mean_log_loss},
          {"clamped", m.clamped}};
}

void print_metrics(std::ostream& out, const Metrics& m) {
  out << "error rate        " << real(m.error_rate) << '\n'
      << "expected 0-1 loss " << real(m.expected_01_loss) << '\n'
      << "mean log-loss     " << real(m.mean_log_loss) << " nats\n";
  if (m.clamped > 0) out << "probabilities clamped to 1e-12: " << m.clamped << '\n';
}

struct TrainCmd {
  std::string data;
  std::string label = "y";
  std::string out;
  double test_fraction = 0.0;
  ModelFlags flags;

  void add(CLI::App& app) {
    app.add_option("--data", data, "training CSV")->required();
    app.add_option("--label", label, "label column")->capture_default_str();
    app.add_option("--out", out, "model file to write (.mrc)");
    app.add_option("--test-fraction", test_fraction, "hold out this fraction for evaluation")
        ->capture_default_str();
    flags.add_model_options(app, false);
  }

  int run(std::ostream& out_stream) const {
    const FitOptions options = flags.options();
    if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw UsageError("--test-fraction must be in [0, 1)");
    LabeledDataset train = load_csv(data, label);
    std::optional<LabeledDataset> test;
    if (test_fraction > 0.0) {
      auto parts = split(train, test_fraction, flags.seed);
      train = std::move(parts.first);
      test = std::move(parts.second);
    }
    const MRCModel model = fit(options, train);
    if (!out.empty()) save_model(model, out);

    const Index d_out = model.feature_map.d_out;
    out_stream << "variant   " << to_string(model.variant) << '\n'
               << "loss      " << to_string(model.loss) << '\n'
               << "map       " << to_string(model.feature_map.kind) << '\n'
               << "n         " << train.size() << '\n'
               << "d_out     " << d_out << '\n'
               << "m         " << model.mu.size() << '\n'
               << "objective " << real(model.upper_bound) << "  (" << objective_label(model) << ")\n";
    if (model.lower_bound) out_stream << "lower     " << real(*model.lower_bound) << '\n';
    out_stream << "solver    " << to_string(model.solver.backend) << ", " << model.solver.iterations
               << " iterations\n";
    json report = {{"command", "train"},
                   {"variant", to_string(model.variant)},
                   {"loss", to_string(model.loss)},
                   {"map", to_string(model.feature_map.kind)},
                   {"n", train.size()},
                   {"d_out", d_out},
                   {"m", model.mu.size()},
                   {"upper_bound", model.upper_bound},
                   {"upper_is_risk_bound", model.upper_is_risk_bound()},
                   {"objective_label", objective_label(model)},
                   {"lower_bound", bound_or_null(model.lower_bound)},
                   {"solver", to_string(model.solver.backend)},
                   {"solver_iterations", model.solver.iterations},
                   {"model", out.empty() ? json(nullptr) : json(out)}};
    if (test) {
      const Metrics m = evaluate(model, *test);
      out_stream << "held-out (" << test->size() << " rows)\n";
      print_metrics(out_stream, m);
      report["test"] = metrics_json(m);
      report["test"]["n"] = test->size();
    }
    print_block(out_stream, report);
    return kExitOk;
  }
};

struct PredictCmd {
  std::string model_path;
  std::string data;
  std::string label = "y";
  std::string out;

  void add(CLI::App& app) {
    app.add_option("--model", model_path, "model file")->required();
    app.add_option("--data", data, "CSV of instances")->required();
    app.add_option("--label", label, "label column to ignore if present")->capture_default_str();
    app.add_option("--out", out, "CSV to write (default: standard output)");
  }

  int run(std::ostream& out_stream) const {
    const MRCModel model = load_model(std::filesystem::path(model_path));
    const Matrix x = load_instances_csv(data, label);
    const Matrix proba = predict_proba(model, x);
    const std::vector<std::string> labels = predict(model, x);
    std::ostringstream csv;
    csv << "row,label";
    for (const auto& c : model.class_labels) csv << ",p_" << c;
    csv << '\n';
    for (Index i = 0; i < proba.rows(); ++i) {
      csv << i << ',' << labels[static_cast<std::size_t>(i)];
      for (Index y = 0; y < proba.cols(); ++y) csv << ',' << real(proba(i, y));
      csv << '\n';
    }
    if (out.empty()) {
      out_stream << csv.str();
    } else {
      std::ofstream file(out, std::ios::binary);
      if (!file) throw DataError("cannot open '" + out + "' for writing");
      file << csv.str();
      if (!file.flush()) throw DataError("write failed for '" + out + "'");
    }
    return kExitOk;
  }
};

struct EvalCmd {
  std::string model_path;
  std::string data;
  std::string label = "y";

  void add(CLI::App& app) {
    app.add_option("--model", model_path, "model file")->required();
    app.add_option("--data", data, "labeled CSV")->required();
    app.add_option("--label", label, "label column")->capture_default_str();
  }

  int run(std::ostream& out) const {
    const MRCModel model = load_model(std::filesystem::path(model_path));
    const LabeledDataset test = load_csv_with_classes(data, label, model.class_labels);
    const Metrics m = evaluate(model, test);
    print_metrics(out, m);
    json report = metrics_json(m);
    report["command"] = "eval";
    report["n"] = test.size();
    print_block(out, report);
    return kExitOk;
  }
};

struct BoundsCmd {
  std::string model_path;
  std::string data;
  std::string label = "y";

  void add(CLI::App& app) {
    app.add_option("--model", model_path, "model file")->required();
    app.add_option("--data", data, "the model's training CSV");
    app.add_option("--label", label, "label column")->capture_default_str();
  }

  int run(std::ostream& out) const {
    const MRCModel model = load_model(std::filesystem::path(model_path));
    out << "stored objective " << real(model.upper_bound) << "  (" << objective_label(model) << ")\n";
    if (model.lower_bound) out << "stored lower     " << real(*model.lower_bound) << '\n';
    json report = {{"command", "bounds"},
                   {"variant", to_string(model.variant)},
                   {"loss", to_string(model.loss)},
                   {"upper_is_risk_bound", model.upper_is_risk_bound()},
                   {"stored_upper_bound", model.upper_bound},
                   {"stored_lower_bound", bound_or_null(model.lower_bound)}};
    // The candidate set is the training instances, which the model does not keep.
    if (!data.empty()) {
      const LabeledDataset train = load_csv_with_classes(data, label, model.class_labels);
      const BoundReport bounds = recompute_bounds(model, train);
      out << "recomputed upper " << real(bounds.upper_bound) << '\n';
      if (bounds.lower_bound) out << "recomputed lower " << real(*bounds.lower_bound) << '\n';
      report["upper_bound"] = bounds.upper_bound;
      report["lower_bound"] = bound_or_null(bounds.lower_bound);
    }
    print_block(out, report);
    return kExitOk;
  }
};

struct BenchmarkCmd {
  std::vector<std::string> data;
  std::string label = "y";
  std::vector<std::string> variants{"mrc", "cmrc"};
  std::vector<std::string> losses{"0-1", "log"};
  std::vector<std::string> phis{"linear"};
  std::vector<double> s_values{0.3};
  int repeats = 1;
  double test_fraction = 0.3;
  std::string out = "benchmark.csv";
  ModelFlags flags;

  void add(CLI::App& app) {
    app.add_option("--data", data, "labeled CSVs (default: one generated blob set)");
    app.add_option("--label", label, "label column")->capture_default_str();
    app.add_option("--variant", variants, "variants to sweep")->capture_default_str();
    app.add_option("--loss", losses, "losses to sweep")->capture_default_str();
    app.add_option("--phi", phis, "feature maps to sweep")->capture_default_str();
    app.add_option("--s", s_values, "band scales to sweep")->capture_default_str();
    app.add_option("--repeats", repeats, "seeds per cell, starting at --seed")->capture_default_str();
    app.add_option("--test-fraction", test_fraction, "held-out fraction")->capture_default_str();
    app.add_option("--out", out, "results CSV")->capture_default_str();
    flags.add_model_options(app, true);
  }

  struct Row {
    std::string dataset, variant, loss, phi;
    double s;
    std::uint64_t seed;
    std::string rest;
  };

  int run(std::ostream& out_stream) const {
    if (repeats < 1) throw UsageError("--repeats must be >= 1");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw UsageError("--test-fraction must be in (0, 1)");
    std::vector<std::pair<std::string, LabeledDataset>> sets;
    for (const auto& path : data) sets.emplace_back(path, load_csv(path, label));
    if (sets.empty()) sets.emplace_back("blobs", gen_blobs(300, 3, 4, 2.0, flags.seed));

    std::vector<Row> rows;
    for (const auto& [name, ds] : sets)
      for (const auto& variant : variants)
        for (const auto& loss : losses)
          for (const auto& phi : phis)
            for (double s : s_values)
              for (int rep = 0; rep < repeats; ++rep) {
                ModelFlags cell = flags;
                cell.variant = variant;
                cell.loss = loss;
                cell.phi = phi;
                cell.s = s;
                cell.seed = flags.seed + static_cast<std::uint64_t>(rep);
                const auto [train, test] = split(ds, test_fraction, cell.seed);
                const MRCModel model = fit(cell.options(), train);
                const Metrics m = evaluate(model, test);
                std::ostringstream rest;
                rest << train.size() << ',' << test.size() << ',' << real(model.upper_bound) << ','
                     << (model.upper_is_risk_bound() ? "true" : "false") << ','
                     << (model.lower_bound ? real(*model.lower_bound) : "") << ',' << real(m.error_rate)
                     << ',' << real(m.expected_01_loss) << ',' << real(m.mean_log_loss) << ','
                     << model.solver.iterations;
                rows.push_back({name, variant, loss, phi, s, cell.seed, rest.str()});
              }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return std::tie(a.dataset, a.variant, a.loss, a.phi, a.s, a.seed) <
             std::tie(b.dataset, b.variant, b.loss, b.phi, b.s, b.seed);
    });

    std::ofstream file(out, std::ios::binary);
    if (!file) throw DataError("cannot open '" + out + "' for writing");
    file << "dataset,variant,loss,phi,s,seed,n_train,n_test,upper_bound,upper_is_risk_bound,"
            "lower_bound,test_error,test_expected_01,test_log_loss,iterations\n";
    for (const Row& r : rows)
      file << r.dataset << ',' << r.variant << ',' << r.loss << ',' << r.phi << ',' << real(r.s) << ','
           << r.seed << ',' << r.rest << '\n';
    if (!file.flush()) throw DataError("write failed for '" + out + "'");
    out_stream << rows.size() << " runs written to " << out << '\n';
    return kExitOk;
  }
};

struct GenDataCmd {
  int n = 200;
  int k = 2;
  int d = 2;
  double separation = 2.0;
  std::uint64_t seed = 0;
  std::string label = "y";
  std::string out;

  void add(CLI::App& app) {
    app.add_option("--n", n, "samples")->capture_default_str();
    app.add_option("--k", k, "classes")->capture_default_str();
    app.add_option("--d", d, "input dimension")->capture_default_str();
    app.add_option("--separation", separation, "distance of class centers from the origin")
        ->capture_default_str();
    app.add_option("--seed", seed, "seed")->capture_default_str();
    app.add_option("--label", label, "label column name")->capture_default_str();
    app.add_option("--out", out, "CSV to write")->required();
  }

  int run(std::ostream& out_stream) const {
    const LabeledDataset ds = gen_blobs(n, k, d, separation, seed);
    write_csv(out, ds, label);
    out_stream << ds.size() << " rows written to " << out << '\n';
    return kExitOk;
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimax risk classifiers: train, predict, evaluate and bound."};
  app.name("mrc");
  app.require_subcommand(1);
  TrainCmd train;
  PredictCmd predict_cmd;
  EvalCmd eval;
  BoundsCmd bounds;
  BenchmarkCmd benchmark;
  GenDataCmd gen_data;
  train.add(*app.add_subcommand("train", "fit a model and print its bounds"));
  predict_cmd.add(*app.add_subcommand("predict", "write labels and class probabilities as CSV"));
  eval.add(*app.add_subcommand("eval", "error rate and log-loss on labeled data"));
  bounds.add(*app.add_subcommand("bounds", "print a model's bounds, recomputed when --data is given"));
  benchmark.add(*app.add_subcommand("benchmark", "sweep variant x loss x map x s into a CSV table"));
  gen_data.add(*app.add_subcommand("gen-data", "write a Gaussian blob dataset"));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "mrc: usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const CLI::App* cmd = app.get_subcommands().front();
    const std::string& name = cmd->get_name();
    if (name == "train") return train.run(out);
    if (name == "predict") return predict_cmd.run(out);
    if (name == "eval") return eval.run(out);
    if (name == "bounds") return bounds.run(out);
    if (name == "benchmark") return benchmark.run(out);
    return gen_data.run(out);
  } catch (const UsageError& e) {
    err << "mrc: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "mrc: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    err << "mrc: numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "mrc: numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace mrc
