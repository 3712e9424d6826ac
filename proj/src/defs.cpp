#include "evfusion/defs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>

#include "evfusion/error.hpp"

namespace evfusion {

ParseError::ParseError(Kind kind, SourcePos pos, const std::string& message)
    : std::runtime_error(fmt::format("{}:{}: {} error: {}", pos.line, pos.column, to_string(kind), message)),
      kind_(kind),
      pos_(pos),
      detail_(message) {}

const char* to_string(ParseError::Kind kind) noexcept {
  switch (kind) {
    case ParseError::Kind::Lex: return "lex";
    case ParseError::Kind::Syntax: return "syntax";
    case ParseError::Kind::Resolution: return "resolution";
    case ParseError::Kind::Duplicate: return "duplicate";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxNesting = 256;

enum class Tok { Ident, Number, NegInf, LBracket, LParen, RParen, Comma, Colon, Define, End };

struct Token {
  Tok type;
  std::string text;
  double number = 0.0;
  SourcePos pos;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::NegInf: return "'-inf'";
    case Tok::LBracket: return "'['";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Define: return "':='";
    case Tok::End: return "end of input";
  }
  return "token";
}

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_keyword(std::string_view s) {
  static const std::set<std::string_view> kw = {"sensor", "feature", "from", "event", "on",
                                                "object", "and",     "or",   "not",   "inf"};
  return kw.count(s) > 0;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_blank();
      const SourcePos pos = pos_;
      if (at_end()) {
        out.push_back({Tok::End, {}, 0.0, pos});
        return out;
      }
      const char c = peek();
      if (is_ident_start(c)) {
        std::size_t start = i_;
        while (!at_end() && is_ident_char(peek())) advance();
        out.push_back({Tok::Ident, std::string(src_.substr(start, i_ - start)), 0.0, pos});
      } else if (is_digit(c) || c == '-') {
        out.push_back(number(pos));
      } else {
        advance();
        switch (c) {
          case '[': out.push_back({Tok::LBracket, "[", 0.0, pos}); break;
          case '(': out.push_back({Tok::LParen, "(", 0.0, pos}); break;
          case ')': out.push_back({Tok::RParen, ")", 0.0, pos}); break;
          case ',': out.push_back({Tok::Comma, ",", 0.0, pos}); break;
          case ':':
            if (!at_end() && peek() == '=') {
              advance();
              out.push_back({Tok::Define, ":=", 0.0, pos});
            } else {
              out.push_back({Tok::Colon, ":", 0.0, pos});
            }
            break;
          default: {
            const auto byte = static_cast<unsigned char>(c);
            const std::string shown =
                (byte >= 0x20 && byte < 0x7f) ? fmt::format("'{}'", c) : fmt::format("byte 0x{:02x}", byte);
            throw ParseError(ParseError::Kind::Lex, pos, fmt::format("unexpected character {}", shown));
          }
        }
      }
    }
  }

 private:
  bool at_end() const { return i_ >= src_.size(); }
  char peek() const { return src_[i_]; }

  void advance() {
    if (src_[i_] == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else {
      ++pos_.column;
    }
    ++i_;
  }

  void skip_blank() {
    while (!at_end()) {
      const char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        return;
      }
    }
  }

  Token number(SourcePos pos) {
    const std::size_t start = i_;
    if (peek() == '-') {
      advance();
      if (src_.substr(i_, 3) == "inf" && (i_ + 3 >= src_.size() || !is_ident_char(src_[i_ + 3]))) {
        for (int k = 0; k < 3; ++k) advance();
        return {Tok::NegInf, "-inf", -kInf, pos};
      }
      if (at_end() || !is_digit(peek())) {
        throw ParseError(ParseError::Kind::Lex, pos, "'-' must start a number or '-inf'");
      }
    }
    while (!at_end() && is_digit(peek())) advance();
    if (!at_end() && peek() == '.') {
      advance();
      if (at_end() || !is_digit(peek())) throw ParseError(ParseError::Kind::Lex, pos, "digit expected after '.'");
      while (!at_end() && is_digit(peek())) advance();
    }
    if (!at_end() && (peek() == 'e' || peek() == 'E')) {
      advance();
      if (!at_end() && (peek() == '+' || peek() == '-')) advance();
      if (at_end() || !is_digit(peek())) throw ParseError(ParseError::Kind::Lex, pos, "malformed exponent");
      while (!at_end() && is_digit(peek())) advance();
    }
    if (!at_end() && is_ident_char(peek())) {
      throw ParseError(ParseError::Kind::Lex, pos_, "identifier characters directly after a number");
    }
    const std::string text(src_.substr(start, i_ - start));
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || !std::isfinite(value)) {
      throw ParseError(ParseError::Kind::Lex, pos, fmt::format("number '{}' out of range", text));
    }
    return {Tok::Number, text, value, pos};
  }

  std::string_view src_;
  std::size_t i_ = 0;
  SourcePos pos_;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  DefinitionFile run() {
    while (cur().type != Tok::End) statement();
    return std::move(out_);
  }

 private:
  const Token& cur() const { return toks_[k_]; }
  const Token& take() { return toks_[k_ < toks_.size() - 1 ? k_++ : k_]; }

  [[noreturn]] void syntax(const Token& at, const std::string& expected) const {
    const std::string found = at.type == Tok::Ident ? fmt::format("'{}'", at.text) : describe(at.type);
    throw ParseError(ParseError::Kind::Syntax, at.pos, fmt::format("expected {}, found {}", expected, found));
  }

  bool at_keyword(std::string_view kw) const { return cur().type == Tok::Ident && cur().text == kw; }

  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) syntax(cur(), fmt::format("'{}'", kw));
    take();
  }

  void expect(Tok t) {
    if (cur().type != t) syntax(cur(), describe(t));
    take();
  }

  const Token& identifier() {
    if (cur().type != Tok::Ident) syntax(cur(), "identifier");
    if (is_keyword(cur().text)) syntax(cur(), "identifier (keywords are reserved)");
    return take();
  }

  void statement() {
    if (at_keyword("sensor")) return sensor();
    if (at_keyword("feature")) return feature();
    if (at_keyword("event")) return event();
    if (at_keyword("object")) return object();
    syntax(cur(), "'sensor', 'feature', 'event' or 'object'");
  }

  void sensor() {
    take();
    const Token& id = identifier();
    if (sensors_.count(id.text)) duplicate(id, "sensor");
    sensors_.insert(id.text);
    out_.sensors.push_back({id.text, id.pos});
  }

  void feature() {
    take();
    const Token& id = identifier();
    expect_keyword("from");
    const Token& sensor = identifier();
    if (features_.count(id.text)) duplicate(id, "feature");
    if (!sensors_.count(sensor.text)) undefined(sensor, "sensor");
    features_.insert(id.text);
    out_.features.push_back({id.text, sensor.text, id.pos});
  }

  void event() {
    take();
    const Token& id = identifier();
    expect_keyword("on");
    const Token& feature = identifier();
    expect(Tok::Colon);
    expect(Tok::LBracket);
    double lower = 0.0;
    if (cur().type == Tok::Number || cur().type == Tok::NegInf) {
      lower = take().number;
    } else {
      syntax(cur(), "lower bound");
    }
    expect(Tok::Comma);
    double upper = kInf;
    const Token& ub = cur();
    if (ub.type == Tok::Number) {
      upper = take().number;
    } else if (at_keyword("inf")) {
      take();
    } else {
      syntax(cur(), "upper bound or 'inf'");
    }
    expect(Tok::RParen);
    if (!(upper > lower)) {
      throw ParseError(ParseError::Kind::Syntax, ub.pos, fmt::format("empty interval for event '{}'", id.text));
    }
    if (events_.count(id.text) || objects_.count(id.text)) duplicate(id, "event");
    if (!features_.count(feature.text)) undefined(feature, "feature");
    events_.insert(id.text);
    out_.events.push_back({id.text, feature.text, Interval{lower, upper}, id.pos});
  }

  void object() {
    take();
    const Token& id = identifier();
    expect(Tok::Define);
    depth_ = 0;
    Formula f = expr();
    if (events_.count(id.text) || objects_.count(id.text)) duplicate(id, "object");
    objects_.emplace(id.text, f);
    out_.objects.push_back({id.text, std::move(f), id.pos});
  }

  Formula expr() {
    std::vector<Formula> terms;
    terms.push_back(term());
    while (at_keyword("or")) {
      take();
      terms.push_back(term());
    }
    return Formula::any_of(std::move(terms));
  }

  Formula term() {
    std::vector<Formula> factors;
    factors.push_back(factor());
    while (at_keyword("and")) {
      take();
      factors.push_back(factor());
    }
    return Formula::all_of(std::move(factors));
  }

  Formula factor() {
    if (++depth_ > kMaxNesting) {
      throw ParseError(ParseError::Kind::Syntax, cur().pos, "expression nested too deeply");
    }
    Formula f = factor_inner();
    --depth_;
    return f;
  }

  Formula factor_inner() {
    if (at_keyword("not")) {
      take();
      return Formula::negate(factor());
    }
    if (cur().type == Tok::LParen) {
      take();
      Formula inner = expr();
      expect(Tok::RParen);
      return inner;
    }
    const Token& id = identifier();
    if (auto it = objects_.find(id.text); it != objects_.end()) return it->second;
    if (!events_.count(id.text)) undefined(id, "event or object");
    return Formula::atom(id.text);
  }

  [[noreturn]] void duplicate(const Token& id, const char* what) const {
    throw ParseError(ParseError::Kind::Duplicate, id.pos, fmt::format("{} '{}' is already declared", what, id.text));
  }

  [[noreturn]] void undefined(const Token& id, const char* what) const {
    throw ParseError(ParseError::Kind::Resolution, id.pos, fmt::format("undeclared {} '{}'", what, id.text));
  }

  std::vector<Token> toks_;
  std::size_t k_ = 0;
  std::size_t depth_ = 0;
  DefinitionFile out_;
  std::set<std::string> sensors_, features_, events_;
  std::map<std::string, Formula> objects_;
};

std::string format_bound(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

DefinitionFile parse_definitions(std::string_view source) { return Parser(Lexer(source).run()).run(); }

bool structurally_equal(const DefinitionFile& a, const DefinitionFile& b) {
  if (a.sensors.size() != b.sensors.size() || a.features.size() != b.features.size() ||
      a.events.size() != b.events.size() || a.objects.size() != b.objects.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.sensors.size(); ++i) {
    if (a.sensors[i].id != b.sensors[i].id) return false;
  }
  for (std::size_t i = 0; i < a.features.size(); ++i) {
    if (a.features[i].id != b.features[i].id || a.features[i].sensor != b.features[i].sensor) return false;
  }
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    const auto& x = a.events[i];
    const auto& y = b.events[i];
    if (x.id != y.id || x.feature != y.feature || !(x.interval == y.interval)) return false;
  }
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    if (a.objects[i].id != b.objects[i].id || !a.objects[i].formula.same_structure(b.objects[i].formula)) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> validate_ranges(const DefinitionFile& defs) {
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < defs.events.size(); ++i) {
    for (std::size_t j = i + 1; j < defs.events.size(); ++j) {
      const auto& a = defs.events[i];
      const auto& b = defs.events[j];
      if (a.feature == b.feature && a.interval.intersects(b.interval)) {
        warnings.push_back(fmt::format("events '{}' [{}, {}) and '{}' [{}, {}) on feature '{}' overlap", a.id,
                                       format_bound(a.interval.lower), format_bound(a.interval.upper), b.id,
                                       format_bound(b.interval.lower), format_bound(b.interval.upper),
                                       a.feature));
      }
    }
  }
  return warnings;
}

ResolvedDefinitions resolve(const DefinitionFile& defs) {
  std::set<std::string> sensors;
  for (const auto& s : defs.sensors) {
    if (!sensors.insert(s.id).second) {
      throw ParseError(ParseError::Kind::Duplicate, s.pos, fmt::format("sensor '{}' is already declared", s.id));
    }
  }

  ResolvedDefinitions out;
  std::set<std::string> seen_events;
  for (const auto& f : defs.features) {
    if (!sensors.count(f.sensor)) {
      throw ParseError(ParseError::Kind::Resolution, f.pos, fmt::format("undeclared sensor '{}'", f.sensor));
    }
    std::vector<Event> events;
    for (const auto& e : defs.events) {
      if (e.feature == f.id) events.push_back({e.id, e.interval});
    }
    if (events.empty()) {
      throw ParseError(ParseError::Kind::Resolution, f.pos, fmt::format("feature '{}' has no events", f.id));
    }
    for (const auto& s : out.spaces) {
      if (s->feature_id() == f.id) {
        throw ParseError(ParseError::Kind::Duplicate, f.pos, fmt::format("feature '{}' is already declared", f.id));
      }
    }
    out.spaces.push_back(std::make_shared<const EventSpace>(f.id, f.sensor, std::move(events)));
  }
  for (const auto& e : defs.events) {
    if (!seen_events.insert(e.id).second) {
      throw ParseError(ParseError::Kind::Duplicate, e.pos, fmt::format("event '{}' is already declared", e.id));
    }
    if (std::none_of(defs.features.begin(), defs.features.end(), [&](const FeatureDecl& f) { return f.id == e.feature; })) {
      throw ParseError(ParseError::Kind::Resolution, e.pos, fmt::format("undeclared feature '{}'", e.feature));
    }
  }

  std::set<std::string> seen_objects;
  for (const auto& o : defs.objects) {
    if (!seen_objects.insert(o.id).second || seen_events.count(o.id)) {
      throw ParseError(ParseError::Kind::Duplicate, o.pos, fmt::format("object '{}' is already declared", o.id));
    }
    try {
      out.objects.push_back({o.id, o.formula.resolve(out.spaces)});
    } catch (const Error& err) {
      throw ParseError(ParseError::Kind::Resolution, o.pos, fmt::format("in object '{}': {}", o.id, err.what()));
    }
  }
  return out;
}

std::string to_source(const DefinitionFile& defs) {
  std::string out;
  for (const auto& s : defs.sensors) out += fmt::format("sensor {}\n", s.id);
  for (const auto& f : defs.features) out += fmt::format("feature {} from {}\n", f.id, f.sensor);
  for (const auto& e : defs.events) {
    out += fmt::format("event {} on {} : [{}, {})\n", e.id, e.feature, format_bound(e.interval.lower),
                       format_bound(e.interval.upper));
  }
  for (const auto& o : defs.objects) out += fmt::format("object {} := {}\n", o.id, o.formula.to_string());
  return out;
}

}  // namespace evfusion
