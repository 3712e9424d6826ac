#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "evfusion/formula.hpp"
#include "evfusion/fusion.hpp"
#include "evfusion/model.hpp"

namespace evfusion {

/// Subset of a frame of discernment; bit i set means class i is included.
using FocalSet = std::uint32_t;

/// Basic belief assignment over subsets of `frame`.
class MassFunction {
 public:
  static constexpr std::size_t kMaxFrame = 16;

  MassFunction(std::vector<std::string> frame, std::map<FocalSet, double> masses);

  /// All mass on the whole frame.
  static MassFunction vacuous(std::vector<std::string> frame);
  /// Mass only on singletons, taken from a probability vector.
  static MassFunction bayesian(std::vector<std::string> frame, std::span<const double> probs);

  const std::vector<std::string>& frame() const noexcept { return frame_; }
  const std::map<FocalSet, double>& masses() const noexcept { return masses_; }
  FocalSet whole() const noexcept { return static_cast<FocalSet>((std::uint64_t{1} << frame_.size()) - 1); }
  double mass(FocalSet set) const;

 private:
  std::vector<std::string> frame_;
  std::map<FocalSet, double> masses_;
};

struct Combination {
  MassFunction result;
  /// Mass assigned to the empty set before normalisation.
  double conflict;
};

/// Dempster's rule. Throws TotalConflict when 1 - K < 1e-12.
Combination dempster_combine_with_conflict(const MassFunction& m1, const MassFunction& m2);
MassFunction dempster_combine(const MassFunction& m1, const MassFunction& m2);

/// Splits each focal set's mass equally among its members.
std::vector<double> pignistic(const MassFunction& m);

/// `fuse` with rho fixed at zero.
FusedReport independent_fuse(std::span<const ProbReport> reports, std::span<const ObjectDef> objects,
                             const FusionConfig& config = {});

/// Mass function that the reports on `sensor_axes` induce over the class
/// frame (objects, then the complement class). Cells of those reports'
/// independent product space are evaluated with every other axis unknown;
/// each cell's mass goes to the set of classes it leaves possible.
MassFunction sensor_mass(std::span<const ProbReport> reports, std::span<const std::size_t> sensor_axes,
                         std::span<const Formula> resolved_objects, const std::vector<std::string>& frame);

/// Dempster-Shafer baseline: one mass function per sensor, combined and
/// mapped to class probabilities with the pignistic transform. A totally
/// conflicting sample yields the uniform distribution.
FusedReport dempster_fuse(std::span<const ProbReport> reports, std::span<const ObjectDef> objects,
                          const FusionConfig& config = {});

}  // namespace evfusion
