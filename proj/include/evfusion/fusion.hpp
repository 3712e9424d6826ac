#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evfusion/dependence.hpp"
#include "evfusion/formula.hpp"
#include "evfusion/model.hpp"

namespace evfusion {

/// Joints larger than this are refused with ErrorKind::Capacity.
inline constexpr std::size_t kMaxJointCells = 1'000'000;

inline constexpr const char* kDefaultComplementLabel = "none";

enum class EvaluationMode {
  /// One blended joint over every report per sample; all object probabilities
  /// are read from it and are therefore mutually coherent.
  GlobalJoint,
  /// One blended joint per object over only the features that object
  /// mentions.
  Pairwise,
};

enum class Connective { And, Or };

struct FusionConfig {
  double rho = 0.0;
  RhoMethod rho_method = RhoMethod::Fixed;
  EvaluationMode mode = EvaluationMode::GlobalJoint;
  /// Object labels in output order; empty means declaration order.
  std::vector<std::string> class_order;
  /// Label of the trailing "none of the objects" class.
  std::string complement_label = kDefaultComplementLabel;

  static FusionConfig fixed(double rho, EvaluationMode mode = EvaluationMode::GlobalJoint);
  /// Estimates rho from training feature columns (one vector per feature).
  static FusionConfig estimated(RhoMethod method, const std::vector<std::vector<double>>& training_columns,
                                EvaluationMode mode = EvaluationMode::GlobalJoint);

  void validate() const;
};

EvaluationMode parse_evaluation_mode(std::string_view name);

/// Blended joint over the product of every report's event space, axis i being
/// reports[i]. A single report yields a one-axis table equal to it.
CouplingTable build_global_joint(std::span<const ProbReport> reports, double rho);

/// Total mass of the cells of `joint` at which the resolved formula holds.
double eval_formula_on_joint(const CouplingTable& joint, const Formula& f);

/// The two-event rules, read off the 2-axis blended coupling of the two
/// reports: P(a and b) is the joint cell, P(a or b) = P(a) + P(b) - P(a and b).
double eval_pairwise(std::string_view alpha, std::string_view beta, Connective connective,
                     const ProbReport& report_a, const ProbReport& report_b, double rho);

/// Weighted average of two reports over the same atoms. Weights are
/// normalised to sum to one.
ProbReport merge_duplicate_feature(const ProbReport& report_a, const ProbReport& report_b,
                                   std::pair<double, double> weights);

/// `objects` arranged per `config.class_order` (declaration order if empty).
std::vector<ObjectDef> order_objects(std::span<const ObjectDef> objects, const FusionConfig& config);

/// Fused report over `objects` (ordered per `config.class_order`) plus the
/// complement class 1 - P(o_1 or ... or o_I), which comes last. When objects
/// overlap the class vector is rescaled to sum to one.
FusedReport fuse(std::span<const ProbReport> reports, std::span<const ObjectDef> objects,
                 const FusionConfig& config);

/// Index of the most probable class; ties go to the earlier class.
std::size_t classify_index(const FusedReport& report);
const std::string& classify(const FusedReport& report);

/// Object definitions split into the object classes and, when the last object
/// is exactly `not (o_1 or ... or o_k)` over the preceding objects, the label
/// it gives to the complement class.
struct ClassSet {
  std::vector<ObjectDef> objects;
  std::string complement_label = kDefaultComplementLabel;
};
ClassSet split_complement_object(std::span<const ObjectDef> objects);

}  // namespace evfusion
