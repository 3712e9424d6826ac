#include "evfusion/harness/cli.hpp"

#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "evfusion/calibration.hpp"
#include "evfusion/coupling.hpp"
#include "evfusion/defs.hpp"
#include "evfusion/error.hpp"
#include "evfusion/harness/dataset.hpp"
#include "evfusion/harness/evaluate.hpp"
#include "evfusion/harness/scenario.hpp"

namespace evfusion::harness {

using nlohmann::json;

namespace {

struct RhoOptions {
  std::optional<double> rho;
  std::string estimate;
  std::string train;
  std::string mode = "global";
};

void add_rho_options(CLI::App* cmd, RhoOptions& o) {
  auto* rho = cmd->add_option("--rho", o.rho, "Fixed correlation extent in [0, 1]")->check(CLI::Range(0.0, 1.0));
  auto* est = cmd->add_option("--estimate-rho", o.estimate, "Estimate rho from training features")
                  ->check(CLI::IsMember({"pearson", "distance-correlation", "dcor"}));
  auto* train = cmd->add_option("--train", o.train, "Training feature CSV (header of feature ids)")
                    ->check(CLI::ExistingFile);
  rho->excludes(est);
  est->needs(train);
  cmd->add_option("--mode", o.mode, "Joint evaluation mode")->check(CLI::IsMember({"global", "pairwise"}));
}

Method make_method(MethodKind kind, const RhoOptions& o, Dataset& ds) {
  Method m;
  m.kind = kind;
  m.mode = parse_evaluation_mode(o.mode);
  if (!o.estimate.empty()) {
    m.estimator = parse_rho_method(o.estimate);
    ds.features = parse_feature_csv(read_text_file(o.train)).columns;
  } else {
    m.rho = o.rho.value_or(0.0);
  }
  return m;
}

ResolvedDefinitions load_resolved(const std::string& path, std::ostream& err) {
  const auto defs = load_definitions(path);
  for (const auto& w : validate_ranges(defs)) err << "warning: " << path << ": " << w << "\n";
  return resolve(defs);
}

std::vector<std::vector<double>> read_marginals(const std::string& path) {
  const json doc = json::parse(read_text_file(path));
  const json& m = doc.is_object() ? doc.at("marginals") : doc;
  return m.get<std::vector<std::vector<double>>>();
}

std::string coupling_csv(const CouplingTable& t) {
  std::string out;
  for (std::size_t a = 0; a < t.rank(); ++a) out += fmt::format("axis{},", a);
  out += "probability\n";
  const auto shape = t.shape();
  std::vector<std::size_t> idx(shape.size(), 0);
  for (double cell : t.cells()) {
    for (std::size_t i : idx) out += fmt::format("{},", i);
    out += fmt::format("{:.12g}\n", cell);
    for (std::size_t a = shape.size(); a-- > 0;) {
      if (++idx[a] < shape[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

// Columns after "sample_index", keyed by header name.
FeatureTable read_indexed_columns(const std::string& path) {
  auto t = parse_feature_csv(read_text_file(path));
  if (!t.names.empty() && t.names.front() == "sample_index") {
    t.names.erase(t.names.begin());
    t.columns.erase(t.columns.begin());
  }
  return t;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Event-driven decision-level sensor fusion"};
  app.require_subcommand(1);

  // fuse
  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse per-sample reports into object class probabilities");
  std::string defs_path, reports_path, out_path;
  RhoOptions fuse_rho;
  fuse_cmd->add_option("--defs", defs_path, "Definition file")->required()->check(CLI::ExistingFile);
  fuse_cmd->add_option("--reports", reports_path, "Reports JSON")->required()->check(CLI::ExistingFile);
  fuse_cmd->add_option("--out", out_path, "Fused CSV output")->required();
  add_rho_options(fuse_cmd, fuse_rho);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic labelled scenario");
  std::string config_path, labels_out, features_out;
  std::optional<std::uint64_t> sim_seed;
  std::optional<std::size_t> sim_samples;
  sim_cmd->add_option("--config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--out", out_path, "Reports JSON output")->required();
  sim_cmd->add_option("--labels-out", labels_out, "Labels CSV output");
  sim_cmd->add_option("--features-out", features_out, "Latent feature CSV output");
  sim_cmd->add_option("--seed", sim_seed, "Override the configured seed");
  sim_cmd->add_option("--samples", sim_samples, "Override the configured sample count")->check(CLI::PositiveNumber);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score a fusion method on labelled reports");
  std::string labels_path, method_name, metrics_out, roc_out;
  RhoOptions eval_rho;
  RunOptions run_opts;
  std::optional<double> test_fraction;
  eval_cmd->add_option("--defs", defs_path, "Definition file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--reports", reports_path, "Reports JSON")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--labels", labels_path, "Labels CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--method", method_name, "proposed | independent | dempster")
      ->required()
      ->check(CLI::IsMember({"proposed", "independent", "dempster"}));
  eval_cmd->add_option("--runs", run_opts.runs, "Number of seeded runs")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", run_opts.seed, "Seed for the test splits");
  eval_cmd->add_option("--test-fraction", test_fraction,
                       "Share of samples scored per run (default 1 for one run, 0.5 otherwise)")
      ->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--metrics-out", metrics_out, "Metrics CSV output")->required();
  eval_cmd->add_option("--roc-out", roc_out, "ROC CSV output")->required();
  add_rho_options(eval_cmd, eval_rho);

  // calibrate
  auto* cal_cmd = app.add_subcommand("calibrate", "Fit Platt sigmoids to classifier scores");
  std::string scores_path;
  cal_cmd->add_option("--scores", scores_path, "Scores CSV (sample_index, one column per event)")
      ->required()
      ->check(CLI::ExistingFile);
  cal_cmd->add_option("--labels", labels_path, "0/1 labels CSV with the same columns")->required()->check(CLI::ExistingFile);
  cal_cmd->add_option("--out", out_path, "Model JSON output")->required();

  // couple
  auto* couple_cmd = app.add_subcommand("couple", "Write the blended coupling of the given marginals");
  std::string marginals_path;
  double couple_rho = 0.0;
  couple_cmd->add_option("--marginals", marginals_path, "JSON list of marginals")->required()->check(CLI::ExistingFile);
  couple_cmd->add_option("--rho", couple_rho, "Correlation extent in [0, 1]")->required()->check(CLI::Range(0.0, 1.0));
  couple_cmd->add_option("--out", out_path, "Coupling CSV output")->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  if (!argv_rev.empty()) argv_rev.pop_back();
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (fuse_cmd->parsed()) {
      const auto defs = load_resolved(defs_path, err);
      Dataset ds = parse_reports_json(read_text_file(reports_path), &defs.spaces);
      const Method method = make_method(MethodKind::Proposed, fuse_rho, ds);
      const double rho = resolve_rho(ds, method);
      std::vector<std::size_t> all(ds.samples.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      const auto fused = fuse_samples(ds, all, class_layout(defs), method, rho);
      write_text_file(out_path, fused_csv(fused, all));
      err << fmt::format("fused {} samples with rho = {:.6g}\n", fused.size(), rho);
    } else if (sim_cmd->parsed()) {
      auto cfg = load_scenario_config(config_path);
      if (sim_seed) cfg.seed = *sim_seed;
      if (sim_samples) cfg.n_samples = *sim_samples;
      const Dataset ds = generate_scenario(cfg);
      write_text_file(out_path, to_reports_json(ds));
      if (!labels_out.empty()) write_text_file(labels_out, to_labels_csv(ds.labels));
      if (!features_out.empty()) {
        FeatureTable t;
        for (const auto& s : ds.spaces) t.names.push_back(s->feature_id());
        t.columns = ds.features;
        write_text_file(features_out, to_feature_csv(t));
      }
    } else if (eval_cmd->parsed()) {
      const auto defs = load_resolved(defs_path, err);
      Dataset ds = parse_reports_json(read_text_file(reports_path), &defs.spaces);
      ds.labels = parse_labels_csv(read_text_file(labels_path), ds.samples.size());
      const Method method = make_method(parse_method_kind(method_name), eval_rho, ds);
      run_opts.test_fraction = test_fraction.value_or(run_opts.runs > 1 ? 0.5 : 1.0);
      const auto runs = evaluate_runs(ds, method, defs, run_opts);
      write_text_file(metrics_out, metrics_csv(runs));
      write_text_file(roc_out, roc_csv(runs));
    } else if (cal_cmd->parsed()) {
      const auto scores = read_indexed_columns(scores_path);
      const auto labels = read_indexed_columns(labels_path);
      json doc;
      doc["models"] = json::object();
      for (std::size_t c = 0; c < scores.names.size(); ++c) {
        const auto it = std::find(labels.names.begin(), labels.names.end(), scores.names[c]);
        if (it == labels.names.end()) {
          throw Error(ErrorKind::LabelMismatch, fmt::format("no labels for score column '{}'", scores.names[c]));
        }
        std::vector<int> y;
        for (double v : labels.columns[static_cast<std::size_t>(it - labels.names.begin())]) y.push_back(static_cast<int>(v));
        const auto model = platt_fit(scores.columns[c], y);
        doc["models"][scores.names[c]] = {{"a", model.a}, {"b", model.b}};
      }
      write_text_file(out_path, doc.dump(2) + "\n");
    } else if (couple_cmd->parsed()) {
      const auto marginals = read_marginals(marginals_path);
      write_text_file(out_path, coupling_csv(blended_coupling(marginals, couple_rho)));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace evfusion::harness
