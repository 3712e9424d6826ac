#include "evfusion/harness/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "evfusion/baselines.hpp"
#include "evfusion/error.hpp"

namespace evfusion::harness {

MethodKind parse_method_kind(std::string_view name) {
  if (name == "proposed") return MethodKind::Proposed;
  if (name == "independent") return MethodKind::Independent;
  if (name == "dempster") return MethodKind::Dempster;
  throw Error(ErrorKind::InvalidConfig, fmt::format("unknown method '{}'", name));
}

const char* to_string(MethodKind kind) noexcept {
  switch (kind) {
    case MethodKind::Proposed: return "proposed";
    case MethodKind::Independent: return "independent";
    case MethodKind::Dempster: return "dempster";
  }
  return "unknown";
}

ClassLayout class_layout(const ResolvedDefinitions& defs) {
  auto split = split_complement_object(defs.objects);
  ClassLayout layout{std::move(split.objects), std::move(split.complement_label), {}};
  for (const auto& o : layout.objects) layout.labels.push_back(o.label);
  layout.labels.push_back(layout.complement_label);
  return layout;
}

std::vector<FusedReport> fuse_samples(const Dataset& ds, std::span<const std::size_t> indices,
                                      const ClassLayout& layout, const Method& method, double rho) {
  FusionConfig cfg;
  cfg.rho = rho;
  cfg.mode = method.mode;
  cfg.complement_label = layout.complement_label;
  std::vector<FusedReport> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    const auto& reports = ds.samples.at(i);
    switch (method.kind) {
      case MethodKind::Proposed: out.push_back(fuse(reports, layout.objects, cfg)); break;
      case MethodKind::Independent: out.push_back(independent_fuse(reports, layout.objects, cfg)); break;
      case MethodKind::Dempster: out.push_back(dempster_fuse(reports, layout.objects, cfg)); break;
    }
  }
  return out;
}

double resolve_rho(const Dataset& ds, const Method& method, std::span<const std::size_t> train_rows) {
  if (method.kind != MethodKind::Proposed) return 0.0;
  if (!method.estimator) return method.rho;
  if (ds.features.size() < 2) {
    throw Error(ErrorKind::InsufficientInput, "estimating rho needs at least 2 training feature columns");
  }
  if (train_rows.empty()) return estimate_rho_for_set(ds.features, *method.estimator);
  std::vector<std::vector<double>> cols(ds.features.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (std::size_t r : train_rows) cols[c].push_back(ds.features[c].at(r));
  }
  return estimate_rho_for_set(cols, *method.estimator);
}

namespace {

std::vector<std::size_t> truth_indices(const Dataset& ds, std::span<const std::size_t> indices,
                                       const std::vector<std::string>& classes) {
  if (ds.labels.size() != ds.samples.size()) throw Error(ErrorKind::LabelMismatch, "dataset is not fully labelled");
  std::vector<std::size_t> truth;
  for (std::size_t i : indices) {
    const auto it = std::find(classes.begin(), classes.end(), ds.labels[i]);
    if (it == classes.end()) {
      throw Error(ErrorKind::LabelMismatch, fmt::format("sample {} has label '{}', not a defined class", i, ds.labels[i]));
    }
    truth.push_back(static_cast<std::size_t>(it - classes.begin()));
  }
  return truth;
}

}  // namespace

MetricsReport evaluate(const Dataset& ds, const Method& method, const ResolvedDefinitions& defs) {
  const auto layout = class_layout(defs);
  std::vector<std::size_t> all(ds.samples.size());
  std::iota(all.begin(), all.end(), 0);
  const auto truth = truth_indices(ds, all, layout.labels);
  const double rho = resolve_rho(ds, method);
  return compute_metrics(fuse_samples(ds, all, layout, method, rho), truth, layout.labels);
}

std::vector<RunResult> evaluate_runs(const Dataset& ds, const Method& method, const ResolvedDefinitions& defs,
                                     const RunOptions& options) {
  if (options.runs < 1) throw Error(ErrorKind::InvalidConfig, "runs must be at least 1");
  if (!(options.test_fraction > 0.0 && options.test_fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "test fraction must be in (0, 1]");
  }
  const auto layout = class_layout(defs);
  const std::size_t n = ds.samples.size();
  const auto n_test = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(options.test_fraction * n)));
  const bool aligned_features = !ds.features.empty() && ds.features.front().size() == n;

  std::vector<RunResult> out;
  for (std::size_t run = 0; run < options.runs; ++run) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::size_t> test, train;
    if (n_test >= n) {
      test = order;
    } else {
      std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                        static_cast<std::uint32_t>(run)};
      std::mt19937_64 rng(seq);
      std::shuffle(order.begin(), order.end(), rng);
      test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
      train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
      std::sort(test.begin(), test.end());
      std::sort(train.begin(), train.end());
    }
    RunResult r;
    r.rho = resolve_rho(ds, method, aligned_features ? std::span<const std::size_t>(train) : std::span<const std::size_t>());
    r.test_samples = test.size();
    const auto truth = truth_indices(ds, test, layout.labels);
    r.metrics = compute_metrics(fuse_samples(ds, test, layout, method, r.rho), truth, layout.labels);
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

std::string num(double v) { return std::isnan(v) ? "nan" : fmt::format("{:.12g}", v); }

std::vector<double> row_values(const RunResult& r) {
  std::vector<double> v{r.rho, static_cast<double>(r.test_samples), r.metrics.accuracy};
  v.insert(v.end(), r.metrics.auc.begin(), r.metrics.auc.end());
  for (const auto& row : r.metrics.confusion) {
    for (std::size_t c : row) v.push_back(static_cast<double>(c));
  }
  return v;
}

}  // namespace

std::string metrics_csv(const std::vector<RunResult>& runs) {
  if (runs.empty()) return {};
  const auto& classes = runs.front().metrics.classes;
  std::string out = "run,rho,test_samples,accuracy";
  for (const auto& c : classes) out += ",auc_" + c;
  for (const auto& t : classes) {
    for (const auto& p : classes) out += fmt::format(",conf_{}_{}", t, p);
  }
  out += "\n";

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    rows.push_back(row_values(runs[i]));
    out += std::to_string(i);
    for (double v : rows.back()) out += "," + num(v);
    out += "\n";
  }
  const std::size_t width = rows.front().size();
  std::vector<double> mean(width, 0.0), sd(width, 0.0);
  for (std::size_t c = 0; c < width; ++c) {
    for (const auto& r : rows) mean[c] += r[c];
    mean[c] /= static_cast<double>(rows.size());
    for (const auto& r : rows) sd[c] += (r[c] - mean[c]) * (r[c] - mean[c]);
    sd[c] = rows.size() > 1 ? std::sqrt(sd[c] / static_cast<double>(rows.size() - 1)) : 0.0;
  }
  out += "mean";
  for (double v : mean) out += "," + num(v);
  out += "\nstddev";
  for (double v : sd) out += "," + num(v);
  out += "\n";
  return out;
}

std::string roc_csv(const std::vector<RunResult>& runs) {
  std::string out = "run,class,threshold,fpr,tpr\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& m = runs[i].metrics;
    for (std::size_t k = 0; k < m.classes.size(); ++k) {
      for (const auto& p : m.roc[k].points) {
        out += fmt::format("{},{},{},{},{}\n", i, m.classes[k], std::isinf(p.threshold) ? "inf" : num(p.threshold),
                           num(p.fpr), num(p.tpr));
      }
    }
  }
  return out;
}

std::string fused_csv(const std::vector<FusedReport>& fused, std::span<const std::size_t> indices) {
  if (fused.empty()) return "sample_index,predicted\n";
  std::string out = "sample_index";
  for (const auto& c : fused.front().class_labels) out += "," + c;
  out += ",predicted\n";
  for (std::size_t i = 0; i < fused.size(); ++i) {
    out += std::to_string(indices[i]);
    for (double p : fused[i].class_probs) out += "," + num(p);
    out += "," + classify(fused[i]) + "\n";
  }
  return out;
}

}  // namespace evfusion::harness
