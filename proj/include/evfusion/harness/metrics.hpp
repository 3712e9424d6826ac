#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "evfusion/model.hpp"

namespace evfusion::harness {

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

struct RocCurve {
  /// Starts at (0, 0) with an infinite threshold and ends at (1, 1).
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// One point per distinct score threshold (descending), AUC by the trapezoid
/// rule. Labels are 0/1 and both must occur.
RocCurve roc_points(std::span<const double> scores, std::span<const int> labels);

struct MetricsReport {
  std::vector<std::string> classes;
  double accuracy = 0.0;
  /// confusion[true][predicted]
  std::vector<std::vector<std::size_t>> confusion;
  /// One-vs-rest per class. A class absent from (or making up all of) the
  /// truth has an empty curve and NaN AUC.
  std::vector<RocCurve> roc;
  std::vector<double> auc;
};

/// Accuracy, confusion and per-class ROC from fused class probabilities.
MetricsReport compute_metrics(const std::vector<FusedReport>& fused, std::span<const std::size_t> truth,
                              const std::vector<std::string>& classes);

}  // namespace evfusion::harness
