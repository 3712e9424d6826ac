#include "evfusion/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "evfusion/error.hpp"
#include "evfusion/fusion.hpp"

namespace evfusion::harness {

RocCurve roc_points(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorKind::LengthMismatch, "scores and labels differ in length");
  std::size_t pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(ErrorKind::InvalidConfig, "ROC labels must be 0 or 1");
    pos += static_cast<std::size_t>(y);
  }
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw Error(ErrorKind::SingleClass, "ROC needs both positive and negative samples");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double threshold = scores[order[k]];
    while (k < order.size() && scores[order[k]] == threshold) {
      (labels[order[k]] ? tp : fp) += 1;
      ++k;
    }
    curve.points.push_back({threshold, static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
  }
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    curve.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return curve;
}

MetricsReport compute_metrics(const std::vector<FusedReport>& fused, std::span<const std::size_t> truth,
                              const std::vector<std::string>& classes) {
  if (fused.size() != truth.size()) throw Error(ErrorKind::LengthMismatch, "one label per fused report expected");
  const std::size_t c = classes.size();
  MetricsReport m;
  m.classes = classes;
  m.confusion.assign(c, std::vector<std::size_t>(c, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < fused.size(); ++i) {
    if (fused[i].class_probs.size() != c) throw Error(ErrorKind::LengthMismatch, "fused report has the wrong class count");
    if (truth[i] >= c) throw Error(ErrorKind::LabelMismatch, fmt::format("label index {} out of range", truth[i]));
    const std::size_t pred = classify_index(fused[i]);
    ++m.confusion[truth[i]][pred];
    correct += pred == truth[i] ? 1 : 0;
  }
  m.accuracy = fused.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(fused.size());

  for (std::size_t k = 0; k < c; ++k) {
    std::vector<double> scores;
    std::vector<int> labels;
    for (std::size_t i = 0; i < fused.size(); ++i) {
      scores.push_back(fused[i].class_probs[k]);
      labels.push_back(truth[i] == k ? 1 : 0);
    }
    const auto positives = std::count(labels.begin(), labels.end(), 1);
    if (positives == 0 || positives == static_cast<long>(labels.size())) {
      m.roc.emplace_back();
      m.auc.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    m.roc.push_back(roc_points(scores, labels));
    m.auc.push_back(m.roc.back().auc);
  }
  return m;
}

}  // namespace evfusion::harness
