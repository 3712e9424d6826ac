#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "evfusion/formula.hpp"
#include "evfusion/model.hpp"

// Definition files declare sensors, their features, the events observed on
// each feature and the objects built from those events:
//
//   sensor radar
//   feature v from radar
//   event a1_v on v : [0, 10)
//   event a2_r on r : [300, inf)
//   object o2 := a1_v and a1_d and a2_r
//   object none := not (o1 or o2)
//
//   expr   := term ("or" term)*
//   term   := factor ("and" factor)*
//   factor := "not" factor | "(" expr ")" | IDENT
//
// Names must be declared before use. An object name used inside a later
// object is replaced by that object's formula. Intervals are half-open; the
// bounds accept "inf" (upper) and "-inf" (lower). '#' starts a comment.

namespace evfusion {

struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Lex, Syntax, Resolution, Duplicate };

  ParseError(Kind kind, SourcePos pos, const std::string& message);

  Kind kind() const noexcept { return kind_; }
  SourcePos position() const noexcept { return pos_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Kind kind_;
  SourcePos pos_;
  std::string detail_;
};

const char* to_string(ParseError::Kind kind) noexcept;

struct SensorDecl {
  std::string id;
  SourcePos pos;
};

struct FeatureDecl {
  std::string id;
  std::string sensor;
  SourcePos pos;
};

struct EventDecl {
  std::string id;
  std::string feature;
  Interval interval;
  SourcePos pos;
};

struct ObjectDecl {
  std::string id;
  Formula formula;
  SourcePos pos;
};

struct DefinitionFile {
  std::vector<SensorDecl> sensors;
  std::vector<FeatureDecl> features;
  std::vector<EventDecl> events;
  std::vector<ObjectDecl> objects;
};

/// Equality of every declaration, ignoring source positions.
bool structurally_equal(const DefinitionFile& a, const DefinitionFile& b);

/// Throws ParseError at the first failing position.
DefinitionFile parse_definitions(std::string_view source);

/// One warning per pair of events on the same feature whose ranges intersect.
std::vector<std::string> validate_ranges(const DefinitionFile& defs);

struct ResolvedDefinitions {
  /// One space per feature, in declaration order.
  std::vector<EventSpacePtr> spaces;
  /// Formulas bound to (space index, event index).
  std::vector<ObjectDef> objects;
};

ResolvedDefinitions resolve(const DefinitionFile& defs);

/// Canonical source text; `parse_definitions(to_source(d))` reproduces `d`.
std::string to_source(const DefinitionFile& defs);

}  // namespace evfusion
