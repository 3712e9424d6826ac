#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evfusion/model.hpp"

namespace evfusion {

/// Position of an event atom inside a product space: which axis (event space)
/// and which atom on that axis.
struct AtomRef {
  std::size_t axis = 0;
  std::size_t index = 0;

  bool operator==(const AtomRef&) const = default;
};

/// Kleene truth value used when some axes of the product space are unobserved.
enum class Truth { False, Unknown, True };

/// Boolean combination of named events, i.e. an element of the product
/// sigma-algebra. Atoms are referenced by label and bound to an AtomRef by
/// `resolve`.
class Formula {
 public:
  enum class Kind { Atom, And, Or, Not };

  static Formula atom(std::string label);
  static Formula atom(std::string label, AtomRef ref);
  static Formula all_of(std::vector<Formula> children);
  static Formula any_of(std::vector<Formula> children);
  static Formula negate(Formula child);

  Kind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }
  const std::optional<AtomRef>& ref() const noexcept { return ref_; }
  const std::vector<Formula>& children() const noexcept { return children_; }

  /// True when every atom carries an AtomRef.
  bool resolved() const;

  /// Rebinds every atom by label against `spaces` (axis i = spaces[i]). A label
  /// must occur in exactly one space.
  Formula resolve(std::span<const EventSpace* const> spaces) const;
  Formula resolve(std::span<const EventSpacePtr> spaces) const;

  /// Labels of all atoms, in first-occurrence order, without duplicates.
  std::vector<std::string> atom_labels() const;
  /// Axes referenced by a resolved formula, ascending.
  std::vector<std::size_t> axes() const;

  /// Truth of a resolved formula at a product-space cell.
  bool holds(std::span<const std::size_t> coords) const;

  /// Three-valued truth where `coords[axis]` is ignored for axes with
  /// `known[axis] == false`.
  Truth holds_partial(std::span<const std::size_t> coords, const std::vector<bool>& known) const;

  /// Same formula with atoms remapped through `axis_map` (old axis -> new axis).
  Formula remap_axes(std::span<const std::size_t> axis_map) const;

  /// Rendering in definition-file syntax.
  std::string to_string() const;

  /// Structural equality; AtomRefs are ignored, labels compared.
  bool same_structure(const Formula& other) const;

  bool operator==(const Formula&) const = default;

 private:
  Formula(Kind kind, std::string label, std::optional<AtomRef> ref, std::vector<Formula> children);

  Kind kind_;
  std::string label_;
  std::optional<AtomRef> ref_;
  std::vector<Formula> children_;
};

/// A named object (target class) definition.
struct ObjectDef {
  std::string label;
  Formula formula;

  bool operator==(const ObjectDef&) const = default;
};

}  // namespace evfusion
