#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evfusion/defs.hpp"
#include "evfusion/dependence.hpp"
#include "evfusion/fusion.hpp"
#include "evfusion/harness/dataset.hpp"
#include "evfusion/harness/metrics.hpp"

namespace evfusion::harness {

enum class MethodKind { Proposed, Independent, Dempster };

MethodKind parse_method_kind(std::string_view name);
const char* to_string(MethodKind kind) noexcept;

struct Method {
  MethodKind kind = MethodKind::Proposed;
  /// Used by Proposed when no estimator is set.
  double rho = 0.0;
  /// Proposed only: estimate rho from the dataset's training feature columns.
  std::optional<RhoMethod> estimator;
  EvaluationMode mode = EvaluationMode::GlobalJoint;
};

/// Object classes of a definition file, the complement class last.
struct ClassLayout {
  std::vector<ObjectDef> objects;
  std::string complement_label;
  std::vector<std::string> labels;  // objects..., complement
};
ClassLayout class_layout(const ResolvedDefinitions& defs);

/// Fused report for each sample index in `indices`.
std::vector<FusedReport> fuse_samples(const Dataset& ds, std::span<const std::size_t> indices,
                                      const ClassLayout& layout, const Method& method, double rho);

/// rho the method uses when trained on `train_rows` of ds.features (all rows
/// when empty).
double resolve_rho(const Dataset& ds, const Method& method, std::span<const std::size_t> train_rows = {});

/// Fuses and scores every sample of a labelled dataset.
MetricsReport evaluate(const Dataset& ds, const Method& method, const ResolvedDefinitions& defs);

struct RunOptions {
  std::size_t runs = 1;
  std::uint64_t seed = 0;
  /// Fraction of samples scored in each run; the rest train rho. 1 scores
  /// every sample and trains on every feature row.
  double test_fraction = 1.0;
};

struct RunResult {
  double rho = 0.0;
  std::size_t test_samples = 0;
  MetricsReport metrics;
};

/// Repeated seeded evaluations on random test splits.
std::vector<RunResult> evaluate_runs(const Dataset& ds, const Method& method, const ResolvedDefinitions& defs,
                                     const RunOptions& options);

/// One row per run plus "mean" and "stddev" rows. Columns: run, rho,
/// test_samples, accuracy, auc_<class>..., conf_<true>_<pred>...
std::string metrics_csv(const std::vector<RunResult>& runs);
/// Columns: run, class, threshold, fpr, tpr.
std::string roc_csv(const std::vector<RunResult>& runs);
/// Columns: sample_index, one per class, predicted.
std::string fused_csv(const std::vector<FusedReport>& fused, std::span<const std::size_t> indices);

}  // namespace evfusion::harness
