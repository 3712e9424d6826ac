#include "evfusion/baselines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "evfusion/error.hpp"

namespace evfusion {

MassFunction::MassFunction(std::vector<std::string> frame, std::map<FocalSet, double> masses)
    : frame_(std::move(frame)), masses_(std::move(masses)) {
  if (frame_.empty() || frame_.size() > kMaxFrame) {
    throw Error(ErrorKind::FrameMismatch, fmt::format("frame size {} not in [1, {}]", frame_.size(), kMaxFrame));
  }
  double total = 0.0;
  for (auto it = masses_.begin(); it != masses_.end();) {
    const auto [set, m] = *it;
    if (!std::isfinite(m) || m < 0.0) throw Error(ErrorKind::NegativeMass, fmt::format("mass {} on set {}", m, set));
    if ((set & ~whole()) != 0) throw Error(ErrorKind::FrameMismatch, fmt::format("set {:#x} outside the frame", set));
    if (set == 0 && m > 0.0) throw Error(ErrorKind::InvalidDistribution, "empty set carries mass");
    total += m;
    it = (m == 0.0) ? masses_.erase(it) : std::next(it);
  }
  if (std::abs(total - 1.0) > kProbTolerance) {
    throw Error(ErrorKind::InvalidDistribution, fmt::format("masses sum to {:.12g}", total));
  }
}

MassFunction MassFunction::vacuous(std::vector<std::string> frame) {
  const auto n = frame.size();
  if (n == 0 || n > kMaxFrame) throw Error(ErrorKind::FrameMismatch, "bad frame size");
  return MassFunction(std::move(frame), {{static_cast<FocalSet>((std::uint64_t{1} << n) - 1), 1.0}});
}

MassFunction MassFunction::bayesian(std::vector<std::string> frame, std::span<const double> probs) {
  if (probs.size() != frame.size()) throw Error(ErrorKind::FrameMismatch, "one probability per class expected");
  std::map<FocalSet, double> masses;
  for (std::size_t i = 0; i < probs.size(); ++i) masses[FocalSet{1} << i] = probs[i];
  return MassFunction(std::move(frame), std::move(masses));
}

double MassFunction::mass(FocalSet set) const {
  const auto it = masses_.find(set);
  return it == masses_.end() ? 0.0 : it->second;
}

Combination dempster_combine_with_conflict(const MassFunction& m1, const MassFunction& m2) {
  if (m1.frame() != m2.frame()) throw Error(ErrorKind::FrameMismatch, "mass functions over different frames");
  std::map<FocalSet, double> joint;
  double conflict = 0.0;
  for (const auto& [a, ma] : m1.masses()) {
    for (const auto& [b, mb] : m2.masses()) {
      const FocalSet c = a & b;
      if (c == 0) {
        conflict += ma * mb;
      } else {
        joint[c] += ma * mb;
      }
    }
  }
  const double norm = 1.0 - conflict;
  if (norm < 1e-12) throw Error(ErrorKind::TotalConflict, fmt::format("conflict K = {:.12g}", conflict));
  for (auto& [set, m] : joint) m /= norm;
  return {MassFunction(m1.frame(), std::move(joint)), conflict};
}

MassFunction dempster_combine(const MassFunction& m1, const MassFunction& m2) {
  return dempster_combine_with_conflict(m1, m2).result;
}

std::vector<double> pignistic(const MassFunction& m) {
  std::vector<double> p(m.frame().size(), 0.0);
  for (const auto& [set, mass] : m.masses()) {
    const double share = mass / std::popcount(set);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (set & (FocalSet{1} << i)) p[i] += share;
    }
  }
  return p;
}

FusedReport independent_fuse(std::span<const ProbReport> reports, std::span<const ObjectDef> objects,
                             const FusionConfig& config) {
  FusionConfig independent = config;
  independent.rho = 0.0;
  independent.rho_method = RhoMethod::Fixed;
  return fuse(reports, objects, independent);
}

MassFunction sensor_mass(std::span<const ProbReport> reports, std::span<const std::size_t> sensor_axes,
                         std::span<const Formula> resolved_objects, const std::vector<std::string>& frame) {
  if (frame.size() != resolved_objects.size() + 1) {
    throw Error(ErrorKind::FrameMismatch, "frame must list every object plus the complement class");
  }
  std::vector<std::size_t> shape;
  for (std::size_t axis : sensor_axes) shape.push_back(reports[axis].probs().size());
  checked_cell_count(shape, kMaxJointCells);

  std::vector<bool> known(reports.size(), false);
  for (std::size_t axis : sensor_axes) known[axis] = true;
  const Formula any_object = Formula::any_of({resolved_objects.begin(), resolved_objects.end()});
  const FocalSet complement_bit = FocalSet{1} << resolved_objects.size();

  std::map<FocalSet, double> masses;
  std::vector<std::size_t> local(sensor_axes.size(), 0);
  std::vector<std::size_t> coords(reports.size(), 0);
  for (;;) {
    double p = 1.0;
    for (std::size_t k = 0; k < sensor_axes.size(); ++k) {
      coords[sensor_axes[k]] = local[k];
      p *= reports[sensor_axes[k]].prob(local[k]);
    }
    if (p > 0.0) {
      FocalSet set = 0;
      for (std::size_t j = 0; j < resolved_objects.size(); ++j) {
        if (resolved_objects[j].holds_partial(coords, known) != Truth::False) set |= FocalSet{1} << j;
      }
      if (any_object.holds_partial(coords, known) != Truth::True) set |= complement_bit;
      masses[set] += p;
    }
    std::size_t k = sensor_axes.size();
    while (k-- > 0) {
      if (++local[k] < shape[k]) break;
      local[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }

  // Remove the rounding drift of the cell products.
  double total = 0.0;
  for (const auto& [set, m] : masses) total += m;
  for (auto& [set, m] : masses) m /= total;
  return MassFunction(frame, std::move(masses));
}

FusedReport dempster_fuse(std::span<const ProbReport> reports, std::span<const ObjectDef> objects,
                          const FusionConfig& config) {
  if (reports.empty()) throw Error(ErrorKind::InsufficientInput, "no reports to fuse");
  const auto classes = order_objects(objects, config);

  std::vector<const EventSpace*> spaces;
  for (const auto& r : reports) spaces.push_back(&r.space());
  std::vector<Formula> formulas;
  FusedReport out;
  for (const auto& o : classes) {
    formulas.push_back(o.formula.resolve(spaces));
    out.class_labels.push_back(o.label);
  }
  out.class_labels.push_back(config.complement_label);

  // Sensors in order of first appearance.
  std::vector<std::string> sensors;
  std::vector<std::vector<std::size_t>> axes_by_sensor;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& id = reports[i].space().sensor_id();
    auto it = std::find(sensors.begin(), sensors.end(), id);
    if (it == sensors.end()) {
      sensors.push_back(id);
      axes_by_sensor.emplace_back();
      it = sensors.end() - 1;
    }
    axes_by_sensor[static_cast<std::size_t>(it - sensors.begin())].push_back(i);
  }

  try {
    MassFunction combined = sensor_mass(reports, axes_by_sensor.front(), formulas, out.class_labels);
    for (std::size_t s = 1; s < axes_by_sensor.size(); ++s) {
      combined = dempster_combine(combined, sensor_mass(reports, axes_by_sensor[s], formulas, out.class_labels));
    }
    out.class_probs = pignistic(combined);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::TotalConflict) throw;
    out.class_probs.assign(out.class_labels.size(), 1.0 / static_cast<double>(out.class_labels.size()));
  }
  return out;
}

}  // namespace evfusion
