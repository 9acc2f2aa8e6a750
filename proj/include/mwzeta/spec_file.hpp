#pragma once

// Variety spec files: flat `key = value` lines, `#` starts a comment.
//
//   p = 7
//   family = hyperelliptic        # affine_line | torus | hyperelliptic | glued
//   genus = 1
//   f = 1, 1, 0, 1                # ascending coefficients of f(x)
//   smax = 2
//   precision = auto              # or N,D
//   oracle = on
//   patch.0 = affine_line         # glued only
//   map.0.1 = 1*x^-1              # x_1 = 1 * x_0^-1 on the overlap

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mwzeta/cech.hpp"
#include "mwzeta/error.hpp"

namespace mwzeta {

struct VarietySpec {
  long p = 0;
  std::string family;
  int genus = 0;
  std::vector<long> f;  // ascending
  int smax = 1;
  std::optional<int> target_precision;  // N
  std::optional<int> degree_cap;        // D
  bool oracle = true;
  bool oracle_explicit = false;
  std::vector<std::string> patches;
  std::map<std::pair<int, int>, OverlapMap> maps;
  std::vector<std::string> present;  // keys seen in the file

  bool has(const std::string& key) const { return std::find(present.begin(), present.end(), key) != present.end(); }
};

namespace detail {

inline std::string trim_copy(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] inline void parse_error(int line, const std::string& what) {
  fail("zeta_cli", "ParseError", "line " + std::to_string(line) + ": " + what);
}

inline long parse_long(const std::string& s, int line) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(s, &used);
  } catch (const std::exception&) {
    parse_error(line, "expected an integer, got '" + s + "'");
  }
  if (used != s.size()) parse_error(line, "expected an integer, got '" + s + "'");
  return v;
}

/// "c*x^e", "x^e", "c*x", "x", "-x^-1".
inline OverlapMap parse_overlap(std::string s, int line) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  OverlapMap m;
  const auto xpos = s.find('x');
  if (xpos == std::string::npos) parse_error(line, "overlap map must mention x");
  std::string coeff = s.substr(0, xpos);
  if (!coeff.empty() && coeff.back() == '*') coeff.pop_back();
  if (coeff.empty() || coeff == "+")
    m.coeff = 1;
  else if (coeff == "-")
    m.coeff = -1;
  else
    m.coeff = parse_long(coeff, line);
  const std::string rest = s.substr(xpos + 1);
  if (rest.empty())
    m.exponent = 1;
  else if (rest[0] == '^')
    m.exponent = static_cast<int>(parse_long(rest.substr(1), line));
  else
    parse_error(line, "unexpected '" + rest + "' after x");
  return m;
}

}  // namespace detail

inline VarietySpec parse_spec(std::istream& in) {
  VarietySpec spec;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string text = detail::trim_copy(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) detail::parse_error(line, "expected key = value");
    const std::string key = detail::trim_copy(text.substr(0, eq));
    const std::string value = detail::trim_copy(text.substr(eq + 1));
    if (spec.has(key)) detail::parse_error(line, "duplicate key '" + key + "'");
    spec.present.push_back(key);
    if (key == "p") {
      spec.p = detail::parse_long(value, line);
    } else if (key == "family") {
      spec.family = value;
    } else if (key == "genus") {
      spec.genus = static_cast<int>(detail::parse_long(value, line));
    } else if (key == "f") {
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) spec.f.push_back(detail::parse_long(detail::trim_copy(item), line));
    } else if (key == "smax") {
      spec.smax = static_cast<int>(detail::parse_long(value, line));
    } else if (key == "precision") {
      if (value == "auto") continue;
      const auto comma = value.find(',');
      if (comma == std::string::npos) detail::parse_error(line, "precision must be auto or N,D");
      spec.target_precision = static_cast<int>(detail::parse_long(detail::trim_copy(value.substr(0, comma)), line));
      spec.degree_cap = static_cast<int>(detail::parse_long(detail::trim_copy(value.substr(comma + 1)), line));
    } else if (key == "oracle") {
      if (value != "on" && value != "off") detail::parse_error(line, "oracle must be on or off");
      spec.oracle = value == "on";
      spec.oracle_explicit = true;
    } else if (key.rfind("patch.", 0) == 0) {
      const int idx = static_cast<int>(detail::parse_long(key.substr(6), line));
      if (idx < 0 || idx > 16) detail::parse_error(line, "patch index out of range");
      if (static_cast<int>(spec.patches.size()) <= idx) spec.patches.resize(static_cast<std::size_t>(idx + 1));
      spec.patches[static_cast<std::size_t>(idx)] = value;
    } else if (key.rfind("map.", 0) == 0) {
      const std::string ij = key.substr(4);
      const auto dot = ij.find('.');
      if (dot == std::string::npos) detail::parse_error(line, "map key must be map.i.j");
      const int i = static_cast<int>(detail::parse_long(ij.substr(0, dot), line));
      const int j = static_cast<int>(detail::parse_long(ij.substr(dot + 1), line));
      spec.maps[{i, j}] = detail::parse_overlap(value, line);
    } else {
      detail::parse_error(line, "unknown key '" + key + "'");
    }
  }
  return spec;
}

inline VarietySpec parse_spec_string(const std::string& text) {
  std::istringstream in(text);
  return parse_spec(in);
}

/// Writes a spec back out in the file format; parse_spec(format_spec(s)) reproduces s.
inline std::string format_spec(const VarietySpec& s) {
  std::ostringstream os;
  os << "p = " << s.p << "\nfamily = " << s.family << "\n";
  if (s.has("genus")) os << "genus = " << s.genus << "\n";
  if (!s.f.empty()) {
    os << "f = ";
    for (std::size_t i = 0; i < s.f.size(); ++i) os << (i ? ", " : "") << s.f[i];
    os << "\n";
  }
  for (std::size_t i = 0; i < s.patches.size(); ++i) os << "patch." << i << " = " << s.patches[i] << "\n";
  for (const auto& [key, m] : s.maps)
    os << "map." << key.first << "." << key.second << " = " << m.coeff << "*x^" << m.exponent << "\n";
  os << "smax = " << s.smax << "\n";
  if (s.target_precision && s.degree_cap)
    os << "precision = " << *s.target_precision << "," << *s.degree_cap << "\n";
  else
    os << "precision = auto\n";
  os << "oracle = " << (s.oracle ? "on" : "off") << "\n";
  return os.str();
}

inline VarietySpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) detail::fail("zeta_cli", "ParseError", "cannot open " + path);
  return parse_spec(in);
}

}  // namespace mwzeta
