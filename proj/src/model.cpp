#include "evfusion/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

#include "evfusion/error.hpp"

namespace evfusion {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MassExceedsUnity: return "MassExceedsUnity";
    case ErrorKind::NegativeMass: return "NegativeMass";
    case ErrorKind::InvalidDistribution: return "InvalidDistribution";
    case ErrorKind::InvalidEventSpace: return "InvalidEventSpace";
    case ErrorKind::AxisOutOfRange: return "AxisOutOfRange";
    case ErrorKind::AxisMismatch: return "AxisMismatch";
    case ErrorKind::RhoOutOfRange: return "RhoOutOfRange";
    case ErrorKind::InsufficientInput: return "InsufficientInput";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::UnresolvedAtom: return "UnresolvedAtom";
    case ErrorKind::AmbiguousAtom: return "AmbiguousAtom";
    case ErrorKind::LabelMismatch: return "LabelMismatch";
    case ErrorKind::ZeroWeights: return "ZeroWeights";
    case ErrorKind::Capacity: return "Capacity";
    case ErrorKind::TotalConflict: return "TotalConflict";
    case ErrorKind::FrameMismatch: return "FrameMismatch";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

bool Interval::intersects(const Interval& other) const noexcept {
  return std::max(lower, other.lower) < std::min(upper, other.upper);
}

EventSpace::EventSpace(std::string feature_id, std::string sensor_id, std::vector<Event> events,
                       bool has_complement)
    : feature_id_(std::move(feature_id)),
      sensor_id_(std::move(sensor_id)),
      events_(std::move(events)),
      has_complement_(has_complement) {
  if (events_.empty()) {
    throw Error(ErrorKind::InvalidEventSpace, fmt::format("feature '{}' has no events", feature_id_));
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& e : events_) {
    if (!seen.insert(e.label).second) {
      throw Error(ErrorKind::InvalidEventSpace,
                  fmt::format("duplicate event label '{}' on feature '{}'", e.label, feature_id_));
    }
    if (e.range && !(e.range->upper > e.range->lower)) {
      throw Error(ErrorKind::InvalidEventSpace,
                  fmt::format("event '{}' has an empty range", e.label));
    }
  }
  if (has_complement_ && events_.back().range) {
    throw Error(ErrorKind::InvalidEventSpace, "complement atom must not carry a range");
  }
}

std::optional<std::size_t> EventSpace::index_of(std::string_view label) const noexcept {
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (events_[i].label == label) return i;
  }
  return std::nullopt;
}

std::vector<std::string> EventSpace::labels() const {
  std::vector<std::string> out;
  out.reserve(events_.size());
  for (const auto& e : events_) out.push_back(e.label);
  return out;
}

EventSpace EventSpace::with_complement() const {
  if (has_complement_) return *this;
  auto events = events_;
  events.push_back(Event{kComplementLabel, std::nullopt});
  return EventSpace(feature_id_, sensor_id_, std::move(events), true);
}

ProbReport::ProbReport(EventSpacePtr space, std::vector<double> probs)
    : space_(std::move(space)), probs_(std::move(probs)) {
  if (!space_) throw Error(ErrorKind::InvalidEventSpace, "report without an event space");
  if (probs_.size() != space_->size()) {
    throw Error(ErrorKind::LengthMismatch,
                fmt::format("feature '{}' expects {} probabilities, got {}", space_->feature_id(),
                            space_->size(), probs_.size()));
  }
  require_distribution(probs_, "report");
}

bool ProbReport::operator==(const ProbReport& other) const {
  return probs_ == other.probs_ && (space_ == other.space_ || *space_ == *other.space_);
}

CouplingTable::CouplingTable(std::vector<std::size_t> shape, std::vector<double> cells)
    : shape_(std::move(shape)), cells_(std::move(cells)) {
  if (shape_.empty()) throw Error(ErrorKind::AxisMismatch, "coupling table needs at least one axis");
  if (checked_cell_count(shape_) != cells_.size()) {
    throw Error(ErrorKind::AxisMismatch, "cell count does not match shape");
  }
  require_distribution(cells_, "coupling table");
}

std::size_t CouplingTable::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != shape_.size()) throw Error(ErrorKind::AxisMismatch, "index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    if (index[a] >= shape_[a]) throw Error(ErrorKind::AxisOutOfRange, "cell index out of range");
    flat = flat * shape_[a] + index[a];
  }
  return flat;
}

double CouplingTable::at(std::span<const std::size_t> index) const { return cells_[flat_index(index)]; }

double CouplingTable::at(std::size_t i, std::size_t j) const {
  const std::size_t idx[] = {i, j};
  return at(idx);
}

void require_distribution(std::span<const double> p, const char* what) {
  if (p.empty()) throw Error(ErrorKind::InvalidDistribution, fmt::format("empty {}", what));
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, fmt::format("non-finite entry in {}", what));
    if (v < 0.0) throw Error(ErrorKind::NegativeMass, fmt::format("negative entry {} in {}", v, what));
    if (v > 1.0 + kProbTolerance) {
      throw Error(ErrorKind::InvalidDistribution, fmt::format("entry {} > 1 in {}", v, what));
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbTolerance) {
    throw Error(ErrorKind::InvalidDistribution, fmt::format("{} sums to {:.12g}", what, sum));
  }
}

namespace {

std::vector<double> rescale_to_unit(std::vector<double> v) {
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (std::abs(s - 1.0) > 1e-12) {
    for (double& x : v) x /= s;
  }
  return v;
}

}  // namespace

ProbReport normalize_report(std::span<const double> raw, const EventSpacePtr& space) {
  if (!space) throw Error(ErrorKind::InvalidEventSpace, "null event space");
  for (double v : raw) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "non-finite raw probability");
    if (v < 0.0) throw Error(ErrorKind::NegativeMass, fmt::format("raw probability {} < 0", v));
  }
  const double s = std::accumulate(raw.begin(), raw.end(), 0.0);
  if (s > 1.0 + kProbTolerance) {
    throw Error(ErrorKind::MassExceedsUnity,
                fmt::format("probabilities for '{}' sum to {:.12g}", space->feature_id(), s));
  }

  if (space->has_complement() && raw.size() == space->size()) {
    if (s < 1.0 - kProbTolerance) {
      throw Error(ErrorKind::InvalidDistribution,
                  fmt::format("full report for '{}' sums to {:.12g}", space->feature_id(), s));
    }
    return ProbReport(space, rescale_to_unit({raw.begin(), raw.end()}));
  }
  if (raw.size() != space->declared_size()) {
    throw Error(ErrorKind::LengthMismatch,
                fmt::format("feature '{}' declares {} events, got {} probabilities",
                            space->feature_id(), space->declared_size(), raw.size()));
  }

  std::vector<double> probs(raw.begin(), raw.end());
  if (!space->has_complement() && s >= 1.0 - kProbTolerance) {
    return ProbReport(space, rescale_to_unit(std::move(probs)));
  }
  probs.push_back(std::max(0.0, 1.0 - s));
  auto completed = space->has_complement() ? space : std::make_shared<const EventSpace>(space->with_complement());
  return ProbReport(std::move(completed), rescale_to_unit(std::move(probs)));
}

ProbReport normalize_report(const ProbReport& report) {
  return normalize_report(report.probs(), report.space_ptr());
}

std::size_t checked_cell_count(std::span<const std::size_t> shape, std::size_t limit) {
  std::size_t n = 1;
  for (std::size_t d : shape) {
    if (d == 0) throw Error(ErrorKind::AxisMismatch, "axis of size zero");
    if (n > limit / d) {
      throw Error(ErrorKind::Capacity, fmt::format("product space exceeds {} cells", limit));
    }
    n *= d;
  }
  if (n > limit) throw Error(ErrorKind::Capacity, fmt::format("product space exceeds {} cells", limit));
  return n;
}

}  // namespace evfusion
