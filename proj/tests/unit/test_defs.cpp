#include <gtest/gtest.h>

#include <random>

#include "evfusion/defs.hpp"
#include "evfusion/harness/dataset.hpp"
#include "fuzz.hpp"

using namespace evfusion;

namespace {

const char* kHeader =
    "sensor radar\n"
    "sensor telescope\n"
    "feature v from radar\n"
    "feature d from telescope\n"
    "event a1_v on v : [0, 10)\n"
    "event a2_v on v : [15, 35)\n"
    "event a1_d on d : [0, 60)\n"
    "event a2_d on d : [90, 210)\n";

DefinitionFile parse_with(const std::string& objects) { return parse_definitions(std::string(kHeader) + objects); }

ParseError parse_error(const std::string& text) {
  try {
    parse_definitions(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no ParseError for: " << text;
  return ParseError(ParseError::Kind::Lex, {}, "");
}

std::string data_path(const char* rel) { return std::string(EVFUSION_DATA_DIR) + "/" + rel; }

}  // namespace

TEST(Parse, FiveWayConjunction) {
  const auto d = parse_with("object o2 := a1_v and a1_d and a2_v and a2_d and a1_v\n");
  ASSERT_EQ(d.objects.size(), 1u);
  const auto& f = d.objects[0].formula;
  EXPECT_EQ(f.kind(), Formula::Kind::And);
  ASSERT_EQ(f.children().size(), 5u);
  for (const auto& c : f.children()) EXPECT_EQ(c.kind(), Formula::Kind::Atom);
  EXPECT_EQ(f.children()[2].label(), "a2_v");
}

TEST(Parse, ObjectReferencesAreInlined) {
  const auto d = parse_with("object o1 := a1_v\nobject o2 := a2_v and a2_d\nobject c3 := not (o1 or o2)\n");
  const auto& c3 = d.objects[2].formula;
  ASSERT_EQ(c3.kind(), Formula::Kind::Not);
  const auto& inner = c3.children()[0];
  ASSERT_EQ(inner.kind(), Formula::Kind::Or);
  EXPECT_TRUE(inner.children()[0].same_structure(d.objects[0].formula));
  EXPECT_TRUE(inner.children()[1].same_structure(d.objects[1].formula));
}

TEST(Parse, AndBindsTighterThanOr) {
  const auto d = parse_with("object x := a1_v or a2_v and a1_d\n");
  const auto want = Formula::any_of(
      {Formula::atom("a1_v"), Formula::all_of({Formula::atom("a2_v"), Formula::atom("a1_d")})});
  EXPECT_TRUE(d.objects[0].formula.same_structure(want));

  const auto n = parse_with("object y := not a1_v and a2_v\n");
  EXPECT_TRUE(n.objects[0].formula.same_structure(
      Formula::all_of({Formula::negate(Formula::atom("a1_v")), Formula::atom("a2_v")})));
}

TEST(Parse, UnbalancedParenthesisFailsAtEndOfInput) {
  const std::string text = std::string(kHeader) + "object bad := (a1_v and";
  const auto e = parse_error(text);
  EXPECT_EQ(e.kind(), ParseError::Kind::Syntax);
  EXPECT_EQ(e.position().line, 9u);
  EXPECT_EQ(e.position().column, 24u);
}

TEST(Parse, ErrorKindsAndPositions) {
  EXPECT_EQ(parse_error("sensor radar\nsensor radar\n").kind(), ParseError::Kind::Duplicate);
  const auto lex = parse_error("sensor radar\nfeature v from radar $\n");
  EXPECT_EQ(lex.kind(), ParseError::Kind::Lex);
  EXPECT_EQ(lex.position().line, 2u);
  EXPECT_EQ(lex.position().column, 22u);
  EXPECT_EQ(parse_error("feature v from radar\n").kind(), ParseError::Kind::Resolution);
  EXPECT_EQ(parse_error("sensor s\nfeature f from s\nevent e on f : [3, 1)\n").kind(), ParseError::Kind::Syntax);
  EXPECT_EQ(parse_error("sensor and\n").kind(), ParseError::Kind::Syntax);
  EXPECT_EQ(parse_error(std::string(kHeader) + "event a1_v on d : [1, 2)\n").kind(), ParseError::Kind::Duplicate);
  EXPECT_EQ(parse_error(std::string(kHeader) + "object a1_v := a2_v\n").kind(), ParseError::Kind::Duplicate);
}

TEST(Parse, UndeclaredAtomIsNamed) {
  const auto e = parse_error(std::string(kHeader) + "object o := a1_v and a9_x\n");
  EXPECT_EQ(e.kind(), ParseError::Kind::Resolution);
  EXPECT_NE(std::string(e.what()).find("a9_x"), std::string::npos);
  EXPECT_EQ(e.position().line, 9u);
  EXPECT_EQ(e.position().column, 22u);
}

TEST(Parse, DeepNestingIsRejectedNotOverflowed) {
  std::string deep = std::string(kHeader) + "object o := ";
  deep += std::string(100000, '(') + "a1_v" + std::string(100000, ')');
  EXPECT_EQ(parse_error(deep).kind(), ParseError::Kind::Syntax);

  std::string ok = std::string(kHeader) + "object o := " + std::string(50, '(') + "a1_v" + std::string(50, ')');
  EXPECT_NO_THROW(parse_definitions(ok));
}

TEST(Parse, CommentsAndBounds) {
  const auto d = parse_definitions(
      "# header\nsensor s # trailing\nfeature n from s\nevent lo on n : [-inf, -30)\n"
      "event hi on n : [-10.5, 7.84)\nevent up on n : [1e2, inf)\n");
  ASSERT_EQ(d.events.size(), 3u);
  EXPECT_EQ(d.events[0].interval.lower, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(d.events[0].interval.upper, -30.0);
  EXPECT_EQ(d.events[1].interval.lower, -10.5);
  EXPECT_EQ(d.events[2].interval.lower, 100.0);
  EXPECT_EQ(d.events[2].interval.upper, std::numeric_limits<double>::infinity());
}

TEST(ValidateRanges, OverlapWarnings) {
  const auto one = parse_definitions(
      "sensor r\nfeature cs from r\nevent a1_cs on cs : [0, 20)\nevent a2_cs on cs : [15, 50)\n");
  EXPECT_EQ(validate_ranges(one).size(), 1u);
  const auto none = parse_definitions(std::string(kHeader));
  EXPECT_TRUE(validate_ranges(none).empty());
  const auto single = parse_definitions("sensor r\nfeature f from r\nevent e on f : [0, 1)\n");
  EXPECT_TRUE(validate_ranges(single).empty());
}

TEST(Resolve, SpacesAndBindings) {
  const auto r = resolve(parse_with("object o := a2_v and a1_d\n"));
  ASSERT_EQ(r.spaces.size(), 2u);
  EXPECT_EQ(r.spaces[0]->size(), 2u);
  EXPECT_EQ(r.spaces[1]->size(), 2u);
  EXPECT_EQ(r.spaces[0]->sensor_id(), "radar");
  const auto& f = r.objects[0].formula;
  ASSERT_TRUE(f.resolved());
  EXPECT_EQ(*f.children()[0].ref(), (AtomRef{0, 1}));
  EXPECT_EQ(*f.children()[1].ref(), (AtomRef{1, 0}));
}

TEST(Resolve, FeatureWithoutEventsIsAnError) {
  try {
    resolve(parse_definitions("sensor s\nfeature f from s\n"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseError::Kind::Resolution);
  }
}

TEST(ShippedDefinitions, Dataset1) {
  const auto d = harness::load_definitions(data_path("defs/dataset1.defs"));
  const auto r = resolve(d);
  EXPECT_EQ(r.spaces.size(), 5u);
  ASSERT_EQ(r.objects.size(), 3u);
  EXPECT_EQ(r.objects[0].label, "o1");
  EXPECT_EQ(r.objects[1].label, "o2");
  EXPECT_EQ(r.objects[2].formula.kind(), Formula::Kind::Not);
  EXPECT_EQ(validate_ranges(d).size(), 1u);  // the cs events overlap
  EXPECT_TRUE(structurally_equal(parse_definitions(to_source(d)), d));
}

TEST(ShippedDefinitions, Dataset2) {
  const auto d = harness::load_definitions(data_path("defs/dataset2.defs"));
  const auto r = resolve(d);
  EXPECT_EQ(r.spaces.size(), 3u);
  EXPECT_EQ(r.objects.size(), 3u);
  EXPECT_TRUE(structurally_equal(parse_definitions(to_source(d)), d));
}

TEST(RoundTrip, NestedFormulasSurvive) {
  const auto d = parse_with(
      "object a := (a1_v or a2_v) and not (a1_d and a2_d)\n"
      "object b := a1_v or (a2_v or a1_d)\n"
      "object c := a1_v and (a2_v and a1_d) and not not a2_d\n");
  const auto text = to_source(d);
  EXPECT_TRUE(structurally_equal(parse_definitions(text), d)) << text;
  EXPECT_EQ(to_source(parse_definitions(text)), text);
}

TEST(RoundTrip, NumbersSurvive) {
  const auto d = parse_definitions(
      "sensor s\nfeature f from s\nevent e1 on f : [-10.6658, 7.84)\nevent e2 on f : [1e-300, 0.1)\n"
      "event e3 on f : [-inf, inf)\n");
  EXPECT_TRUE(structurally_equal(parse_definitions(to_source(d)), d));
}

TEST(Fuzz, OnlyParseErrors) {
  std::mt19937_64 rng(5150);
  const std::string seed_text = std::string(kHeader) + "object o1 := a1_v and (a2_d or not a1_d)\nobject c := not o1\n";
  for (int i = 0; i < 2000; ++i) {
    const auto text = fuzz::fuzz_input(rng, seed_text);
    bool position_ok = true;
    const auto outcome = fuzz::run_one(text, &position_ok);
    ASSERT_NE(outcome, fuzz::Outcome::OtherException) << text;
    EXPECT_TRUE(position_ok) << text;
  }
}
