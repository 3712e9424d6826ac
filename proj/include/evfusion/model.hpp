#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evfusion {

/// Tolerance for "sums to one" and marginal-consistency checks.
inline constexpr double kProbTolerance = 1e-9;

/// Label given to the synthetic atom that completes an event space.
inline constexpr const char* kComplementLabel = "other";

/// Half-open interval [lower, upper). `upper` may be +inf, `lower` may be -inf.
struct Interval {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();

  bool contains(double x) const noexcept { return x >= lower && x < upper; }
  bool intersects(const Interval& other) const noexcept;
  bool operator==(const Interval&) const = default;
};

struct Event {
  std::string label;
  std::optional<Interval> range;

  bool operator==(const Event&) const = default;
};

/// The finite set of mutually exclusive events observed for one feature of one
/// sensor. Ranges are descriptive metadata; probabilities are carried by
/// ProbReport.
class EventSpace {
 public:
  EventSpace(std::string feature_id, std::string sensor_id, std::vector<Event> events,
             bool has_complement = false);

  const std::string& feature_id() const noexcept { return feature_id_; }
  const std::string& sensor_id() const noexcept { return sensor_id_; }
  const std::vector<Event>& events() const noexcept { return events_; }
  bool has_complement() const noexcept { return has_complement_; }

  /// Number of atoms, complement included.
  std::size_t size() const noexcept { return events_.size(); }
  /// Number of declared (non-complement) events.
  std::size_t declared_size() const noexcept { return events_.size() - (has_complement_ ? 1 : 0); }

  std::optional<std::size_t> index_of(std::string_view label) const noexcept;
  std::vector<std::string> labels() const;

  /// Copy of this space with a complement atom appended (no-op if present).
  EventSpace with_complement() const;

  bool operator==(const EventSpace&) const = default;

 private:
  std::string feature_id_;
  std::string sensor_id_;
  std::vector<Event> events_;
  bool has_complement_ = false;
};

using EventSpacePtr = std::shared_ptr<const EventSpace>;

/// One sensor's probability vector over an event space for one sample.
class ProbReport {
 public:
  ProbReport(EventSpacePtr space, std::vector<double> probs);

  const EventSpace& space() const noexcept { return *space_; }
  const EventSpacePtr& space_ptr() const noexcept { return space_; }
  std::span<const double> probs() const noexcept { return probs_; }
  double prob(std::size_t atom) const { return probs_.at(atom); }

  bool operator==(const ProbReport& other) const;

 private:
  EventSpacePtr space_;
  std::vector<double> probs_;
};

/// Dense N-dimensional joint probability table, row-major (last axis fastest).
class CouplingTable {
 public:
  CouplingTable(std::vector<std::size_t> shape, std::vector<double> cells);

  std::size_t rank() const noexcept { return shape_.size(); }
  std::span<const std::size_t> shape() const noexcept { return shape_; }
  std::span<const double> cells() const noexcept { return cells_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }

  double at(std::span<const std::size_t> index) const;
  double at(std::size_t i, std::size_t j) const;
  std::size_t flat_index(std::span<const std::size_t> index) const;

  bool operator==(const CouplingTable&) const = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> cells_;
};

/// Fused distribution over the object classes, complement class last.
struct FusedReport {
  std::vector<std::string> class_labels;
  std::vector<double> class_probs;
};

/// Throws InvalidDistribution unless `p` is a probability vector within
/// kProbTolerance.
void require_distribution(std::span<const double> p, const char* what = "probability vector");

/// Turns raw per-event probabilities into a report over `space`. `raw` may list
/// either the declared events only, or every atom of `space`. Missing mass goes
/// to a complement atom (added if the space lacks one).
ProbReport normalize_report(std::span<const double> raw, const EventSpacePtr& space);

/// Idempotent on already-valid reports.
ProbReport normalize_report(const ProbReport& report);

/// Product of the axis sizes; throws Capacity if it exceeds `limit`.
std::size_t checked_cell_count(std::span<const std::size_t> shape,
                               std::size_t limit = std::numeric_limits<std::size_t>::max());

}  // namespace evfusion
