#include "evfusion/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "evfusion/coupling.hpp"
#include "evfusion/error.hpp"

namespace evfusion {

FusionConfig FusionConfig::fixed(double rho, EvaluationMode mode) {
  FusionConfig cfg;
  cfg.rho = rho;
  cfg.mode = mode;
  cfg.validate();
  return cfg;
}

FusionConfig FusionConfig::estimated(RhoMethod method, const std::vector<std::vector<double>>& training_columns,
                                     EvaluationMode mode) {
  FusionConfig cfg;
  cfg.rho = estimate_rho_for_set(training_columns, method);
  cfg.rho_method = method;
  cfg.mode = mode;
  return cfg;
}

void FusionConfig::validate() const {
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error(ErrorKind::RhoOutOfRange, fmt::format("rho = {}", rho));
  for (std::size_t i = 0; i < class_order.size(); ++i) {
    for (std::size_t j = i + 1; j < class_order.size(); ++j) {
      if (class_order[i] == class_order[j]) {
        throw Error(ErrorKind::InvalidConfig, fmt::format("class '{}' listed twice", class_order[i]));
      }
    }
  }
}

EvaluationMode parse_evaluation_mode(std::string_view name) {
  if (name == "global") return EvaluationMode::GlobalJoint;
  if (name == "pairwise") return EvaluationMode::Pairwise;
  throw Error(ErrorKind::InvalidConfig, fmt::format("unknown evaluation mode '{}'", name));
}

CouplingTable build_global_joint(std::span<const ProbReport> reports, double rho) {
  if (reports.empty()) throw Error(ErrorKind::InsufficientInput, "no reports to fuse");
  if (reports.size() == 1) {
    const auto p = reports.front().probs();
    return CouplingTable({p.size()}, {p.begin(), p.end()});
  }
  Marginals marginals;
  std::vector<std::size_t> shape;
  for (const auto& r : reports) {
    marginals.emplace_back(r.probs().begin(), r.probs().end());
    shape.push_back(r.probs().size());
  }
  checked_cell_count(shape, kMaxJointCells);
  return blended_coupling(marginals, rho);
}

double eval_formula_on_joint(const CouplingTable& joint, const Formula& f) {
  const auto shape = joint.shape();
  for (std::size_t axis : f.axes()) {
    if (axis >= shape.size()) throw Error(ErrorKind::UnresolvedAtom, "formula refers to a missing axis");
  }
  std::vector<std::size_t> coords(shape.size(), 0);
  double total = 0.0;
  for (double cell : joint.cells()) {
    if (cell > 0.0 && f.holds(coords)) total += cell;
    for (std::size_t a = shape.size(); a-- > 0;) {
      if (++coords[a] < shape[a]) break;
      coords[a] = 0;
    }
  }
  return std::clamp(total, 0.0, 1.0);
}

double eval_pairwise(std::string_view alpha, std::string_view beta, Connective connective,
                     const ProbReport& report_a, const ProbReport& report_b, double rho) {
  const auto ia = report_a.space().index_of(alpha);
  if (!ia) throw Error(ErrorKind::UnresolvedAtom, fmt::format("event '{}' not in report", alpha));
  const auto ib = report_b.space().index_of(beta);
  if (!ib) throw Error(ErrorKind::UnresolvedAtom, fmt::format("event '{}' not in report", beta));

  const Marginals marginals{{report_a.probs().begin(), report_a.probs().end()},
                            {report_b.probs().begin(), report_b.probs().end()}};
  const double p_and = blended_coupling(marginals, rho).at(*ia, *ib);
  if (connective == Connective::And) return p_and;
  return report_a.prob(*ia) + report_b.prob(*ib) - p_and;
}

ProbReport merge_duplicate_feature(const ProbReport& report_a, const ProbReport& report_b,
                                   std::pair<double, double> weights) {
  if (report_a.space().labels() != report_b.space().labels()) {
    throw Error(ErrorKind::LabelMismatch,
                fmt::format("cannot merge reports on '{}' and '{}': atom labels differ",
                            report_a.space().feature_id(), report_b.space().feature_id()));
  }
  auto [wa, wb] = weights;
  if (!(wa >= 0.0) || !(wb >= 0.0) || !std::isfinite(wa) || !std::isfinite(wb)) {
    throw Error(ErrorKind::NegativeMass, "merge weights must be finite and nonnegative");
  }
  const double total = wa + wb;
  if (total == 0.0) throw Error(ErrorKind::ZeroWeights, "both merge weights are zero");
  wa /= total;
  wb /= total;

  const auto pa = report_a.probs();
  const auto pb = report_b.probs();
  std::vector<double> merged(pa.size());
  for (std::size_t i = 0; i < merged.size(); ++i) merged[i] = wa * pa[i] + wb * pb[i];
  return ProbReport(report_a.space_ptr(), std::move(merged));
}

std::vector<ObjectDef> order_objects(std::span<const ObjectDef> objects, const FusionConfig& config) {
  if (objects.empty()) throw Error(ErrorKind::InsufficientInput, "no objects to fuse");
  if (config.class_order.empty()) return {objects.begin(), objects.end()};
  std::vector<ObjectDef> out;
  for (const auto& label : config.class_order) {
    auto it = std::find_if(objects.begin(), objects.end(), [&](const ObjectDef& o) { return o.label == label; });
    if (it == objects.end()) {
      throw Error(ErrorKind::InvalidConfig, fmt::format("class '{}' is not a defined object", label));
    }
    out.push_back(*it);
  }
  return out;
}

namespace {

// Probability of `f` from a joint over only the reports `f` mentions.
double eval_on_local_joint(std::span<const ProbReport> reports, const Formula& f, double rho) {
  const auto axes = f.axes();
  std::vector<ProbReport> local;
  std::vector<std::size_t> axis_map(reports.size(), 0);
  for (std::size_t k = 0; k < axes.size(); ++k) {
    local.push_back(reports[axes[k]]);
    axis_map[axes[k]] = k;
  }
  return eval_formula_on_joint(build_global_joint(local, rho), f.remap_axes(axis_map));
}

}  // namespace

FusedReport fuse(std::span<const ProbReport> reports, std::span<const ObjectDef> objects,
                 const FusionConfig& config) {
  config.validate();
  if (reports.empty()) throw Error(ErrorKind::InsufficientInput, "no reports to fuse");
  const auto classes = order_objects(objects, config);

  std::vector<const EventSpace*> spaces;
  for (const auto& r : reports) spaces.push_back(&r.space());

  std::vector<Formula> formulas;
  for (const auto& o : classes) formulas.push_back(o.formula.resolve(spaces));
  const Formula any_object = Formula::any_of(formulas);

  FusedReport out;
  double union_prob = 0.0;
  if (config.mode == EvaluationMode::GlobalJoint) {
    const auto joint = build_global_joint(reports, config.rho);
    for (const auto& f : formulas) out.class_probs.push_back(eval_formula_on_joint(joint, f));
    union_prob = eval_formula_on_joint(joint, any_object);
  } else {
    for (const auto& f : formulas) out.class_probs.push_back(eval_on_local_joint(reports, f, config.rho));
    union_prob = eval_on_local_joint(reports, any_object, config.rho);
  }
  out.class_probs.push_back(std::max(0.0, 1.0 - union_prob));

  const double sum = std::accumulate(out.class_probs.begin(), out.class_probs.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12) {
    for (double& p : out.class_probs) p /= sum;
  }

  for (const auto& o : classes) out.class_labels.push_back(o.label);
  out.class_labels.push_back(config.complement_label);
  return out;
}

std::size_t classify_index(const FusedReport& report) {
  if (report.class_probs.empty()) throw Error(ErrorKind::InsufficientInput, "empty fused report");
  std::size_t best = 0;
  for (std::size_t i = 1; i < report.class_probs.size(); ++i) {
    if (report.class_probs[i] > report.class_probs[best]) best = i;
  }
  return best;
}

const std::string& classify(const FusedReport& report) {
  const std::size_t i = classify_index(report);
  if (i >= report.class_labels.size()) throw Error(ErrorKind::LengthMismatch, "fused report without labels");
  return report.class_labels[i];
}

ClassSet split_complement_object(std::span<const ObjectDef> objects) {
  ClassSet out;
  out.objects.assign(objects.begin(), objects.end());
  if (objects.size() < 2) return out;

  std::vector<Formula> others;
  for (std::size_t i = 0; i + 1 < objects.size(); ++i) others.push_back(objects[i].formula);
  const Formula complement = Formula::negate(Formula::any_of(std::move(others)));
  if (objects.back().formula.same_structure(complement)) {
    out.complement_label = objects.back().label;
    out.objects.pop_back();
  }
  return out;
}

}  // namespace evfusion
