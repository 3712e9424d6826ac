#include "evfusion/formula.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "evfusion/error.hpp"

namespace evfusion {

Formula::Formula(Kind kind, std::string label, std::optional<AtomRef> ref, std::vector<Formula> children)
    : kind_(kind), label_(std::move(label)), ref_(ref), children_(std::move(children)) {}

Formula Formula::atom(std::string label) { return Formula(Kind::Atom, std::move(label), std::nullopt, {}); }

Formula Formula::atom(std::string label, AtomRef ref) {
  return Formula(Kind::Atom, std::move(label), ref, {});
}

// Single-child conjunctions and disjunctions collapse to the child so that
// every formula has one canonical tree.
Formula Formula::all_of(std::vector<Formula> children) {
  if (children.empty()) throw Error(ErrorKind::InsufficientInput, "'and' needs at least one operand");
  if (children.size() == 1) return std::move(children.front());
  return Formula(Kind::And, {}, std::nullopt, std::move(children));
}

Formula Formula::any_of(std::vector<Formula> children) {
  if (children.empty()) throw Error(ErrorKind::InsufficientInput, "'or' needs at least one operand");
  if (children.size() == 1) return std::move(children.front());
  return Formula(Kind::Or, {}, std::nullopt, std::move(children));
}

Formula Formula::negate(Formula child) {
  std::vector<Formula> c;
  c.push_back(std::move(child));
  return Formula(Kind::Not, {}, std::nullopt, std::move(c));
}

bool Formula::resolved() const {
  if (kind_ == Kind::Atom) return ref_.has_value();
  return std::all_of(children_.begin(), children_.end(), [](const Formula& c) { return c.resolved(); });
}

Formula Formula::resolve(std::span<const EventSpace* const> spaces) const {
  if (kind_ == Kind::Atom) {
    std::optional<AtomRef> found;
    for (std::size_t axis = 0; axis < spaces.size(); ++axis) {
      if (auto idx = spaces[axis]->index_of(label_)) {
        if (found) {
          throw Error(ErrorKind::AmbiguousAtom,
                      fmt::format("event '{}' occurs on more than one feature", label_));
        }
        found = AtomRef{axis, *idx};
      }
    }
    if (!found) throw Error(ErrorKind::UnresolvedAtom, fmt::format("unknown event '{}'", label_));
    return atom(label_, *found);
  }
  std::vector<Formula> kids;
  kids.reserve(children_.size());
  for (const auto& c : children_) kids.push_back(c.resolve(spaces));
  return Formula(kind_, {}, std::nullopt, std::move(kids));
}

Formula Formula::resolve(std::span<const EventSpacePtr> spaces) const {
  std::vector<const EventSpace*> raw;
  raw.reserve(spaces.size());
  for (const auto& s : spaces) raw.push_back(s.get());
  return resolve(std::span<const EventSpace* const>(raw));
}

std::vector<std::string> Formula::atom_labels() const {
  std::vector<std::string> out;
  auto visit = [&out](const Formula& f, const auto& self) -> void {
    if (f.kind_ == Kind::Atom) {
      if (std::find(out.begin(), out.end(), f.label_) == out.end()) out.push_back(f.label_);
      return;
    }
    for (const auto& c : f.children_) self(c, self);
  };
  visit(*this, visit);
  return out;
}

std::vector<std::size_t> Formula::axes() const {
  std::vector<std::size_t> out;
  auto visit = [&out](const Formula& f, const auto& self) -> void {
    if (f.kind_ == Kind::Atom) {
      if (!f.ref_) throw Error(ErrorKind::UnresolvedAtom, fmt::format("unresolved event '{}'", f.label_));
      out.push_back(f.ref_->axis);
      return;
    }
    for (const auto& c : f.children_) self(c, self);
  };
  visit(*this, visit);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool Formula::holds(std::span<const std::size_t> coords) const {
  switch (kind_) {
    case Kind::Atom:
      if (!ref_) throw Error(ErrorKind::UnresolvedAtom, fmt::format("unresolved event '{}'", label_));
      return coords[ref_->axis] == ref_->index;
    case Kind::And:
      return std::all_of(children_.begin(), children_.end(), [&](const Formula& c) { return c.holds(coords); });
    case Kind::Or:
      return std::any_of(children_.begin(), children_.end(), [&](const Formula& c) { return c.holds(coords); });
    case Kind::Not:
      return !children_.front().holds(coords);
  }
  return false;
}

Truth Formula::holds_partial(std::span<const std::size_t> coords, const std::vector<bool>& known) const {
  switch (kind_) {
    case Kind::Atom:
      if (!ref_) throw Error(ErrorKind::UnresolvedAtom, fmt::format("unresolved event '{}'", label_));
      if (!known[ref_->axis]) return Truth::Unknown;
      return coords[ref_->axis] == ref_->index ? Truth::True : Truth::False;
    case Kind::And: {
      Truth acc = Truth::True;
      for (const auto& c : children_) {
        const Truth t = c.holds_partial(coords, known);
        if (t == Truth::False) return Truth::False;
        if (t == Truth::Unknown) acc = Truth::Unknown;
      }
      return acc;
    }
    case Kind::Or: {
      Truth acc = Truth::False;
      for (const auto& c : children_) {
        const Truth t = c.holds_partial(coords, known);
        if (t == Truth::True) return Truth::True;
        if (t == Truth::Unknown) acc = Truth::Unknown;
      }
      return acc;
    }
    case Kind::Not: {
      const Truth t = children_.front().holds_partial(coords, known);
      if (t == Truth::Unknown) return t;
      return t == Truth::True ? Truth::False : Truth::True;
    }
  }
  return Truth::Unknown;
}

Formula Formula::remap_axes(std::span<const std::size_t> axis_map) const {
  if (kind_ == Kind::Atom) {
    if (!ref_) throw Error(ErrorKind::UnresolvedAtom, fmt::format("unresolved event '{}'", label_));
    return atom(label_, AtomRef{axis_map[ref_->axis], ref_->index});
  }
  std::vector<Formula> kids;
  kids.reserve(children_.size());
  for (const auto& c : children_) kids.push_back(c.remap_axes(axis_map));
  return Formula(kind_, {}, std::nullopt, std::move(kids));
}

std::string Formula::to_string() const {
  switch (kind_) {
    case Kind::Atom:
      return label_;
    case Kind::Not: {
      const auto& c = children_.front();
      if (c.kind_ == Kind::Atom || c.kind_ == Kind::Not) return "not " + c.to_string();
      return "not (" + c.to_string() + ")";
    }
    case Kind::And:
    case Kind::Or: {
      const bool is_and = kind_ == Kind::And;
      std::string out;
      for (std::size_t i = 0; i < children_.size(); ++i) {
        const auto& c = children_[i];
        // Nested operators of the same kind keep their parentheses, otherwise
        // re-parsing would flatten them into the parent.
        const bool wrap = c.kind_ == Kind::Or || (is_and && c.kind_ == Kind::And);
        if (i > 0) out += is_and ? " and " : " or ";
        out += wrap ? "(" + c.to_string() + ")" : c.to_string();
      }
      return out;
    }
  }
  return {};
}

bool Formula::same_structure(const Formula& other) const {
  if (kind_ != other.kind_ || label_ != other.label_ || children_.size() != other.children_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < children_.size(); ++i) {
    if (!children_[i].same_structure(other.children_[i])) return false;
  }
  return true;
}

}  // namespace evfusion
