// Definition-file fuzzing shared by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "evfusion/defs.hpp"

namespace fuzz {

inline const std::vector<std::string>& tokens() {
  static const std::vector<std::string> t{
      "sensor", "feature", "from", "event", "on", "object", "and", "or", "not", "inf", "-inf",
      ":=", ":", "[", "]", "(", ")", ",", "radar", "v", "a1_v", "o1", "0", "10", "-3.5", "1e400",
      "#", "\n", " ", "\t", "1.", ".5", "--", "\xff", "\xc3\xa9", std::string(1, '\0'), "=", "9x"};
  return t;
}

/// Either a mutation of `seed_text` or a random token soup.
inline std::string fuzz_input(std::mt19937_64& rng, const std::string& seed_text) {
  std::uniform_int_distribution<int> coin(0, 9);
  std::uniform_int_distribution<std::size_t> tok(0, tokens().size() - 1);
  std::string s;
  if (coin(rng) < 4) {
    const int n = std::uniform_int_distribution<int>(0, 60)(rng);
    for (int i = 0; i < n; ++i) {
      s += tokens()[tok(rng)];
      if (coin(rng) < 7) s += ' ';
    }
    return s;
  }
  s = seed_text;
  const int edits = std::uniform_int_distribution<int>(1, 8)(rng);
  for (int e = 0; e < edits && !s.empty(); ++e) {
    const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(rng);
    switch (coin(rng) % 5) {
      case 0: s.erase(pos, std::uniform_int_distribution<std::size_t>(1, 12)(rng)); break;
      case 1: s.insert(pos, tokens()[tok(rng)]); break;
      case 2: s[pos] = static_cast<char>(std::uniform_int_distribution<int>(0, 255)(rng)); break;
      case 3: {
        const std::size_t len = std::min<std::size_t>(s.size() - pos, 20);
        s.insert(std::uniform_int_distribution<std::size_t>(0, s.size())(rng), s.substr(pos, len));
        break;
      }
      default: s.resize(pos); break;
    }
  }
  if (coin(rng) == 0) s = std::string(static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 400)(rng)), '(') + s;
  return s;
}

enum class Outcome { Parsed, ParseError, OtherException };

/// Parses and, on success, resolves `text`. Positions of reported errors must
/// point inside the source (or one past its end).
inline Outcome run_one(const std::string& text, bool* position_ok = nullptr) {
  try {
    const auto defs = evfusion::parse_definitions(text);
    evfusion::validate_ranges(defs);
    evfusion::resolve(defs);
    return Outcome::Parsed;
  } catch (const evfusion::ParseError& e) {
    if (position_ok) {
      const auto lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) + 1;
      *position_ok = e.position().line >= 1 && e.position().line <= lines && e.position().column >= 1;
    }
    return Outcome::ParseError;
  } catch (...) {
    return Outcome::OtherException;
  }
}

}  // namespace fuzz
