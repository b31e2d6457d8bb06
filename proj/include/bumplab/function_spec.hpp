#pragma once

// Text specs for grid functions, as used by configs and CLI flags.
//
//   spec  := "M" k ":" spec            k-fold maximal function of spec
//          | term ("+" term)*
//   term  := [coef "*"] atom | number
//   atom  := const:c | x | indicator:a,b | gaussian:c,sigma | bump:c,r
//          | log_spike:eps | haar:first,len | power:alpha | <name>
//
// <name> refers to an already-built function (for example "u" in "M5:u").
// Examples: "const:1+gaussian:0,0.3", "M5:u", "0.5*bump:0,0.25".

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bumplab/error.hpp"
#include "bumplab/grid.hpp"
#include "bumplab/weights.hpp"

namespace bumplab {

using NamedFunctions = std::map<std::string, GridFunction, std::less<>>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  std::string buf(s);
  std::size_t used = 0;
  try {
    out = std::stod(buf, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == buf.size();
}

inline double number_or_throw(std::string_view s, std::string_view context) {
  double v = 0.0;
  if (!parse_number(s, v)) throw ValidationError("bad number '" + std::string(s) + "' in '" + std::string(context) + "'");
  return v;
}

// Splits on '+' except inside exponents such as 1e+3.
inline std::vector<std::string_view> split_terms(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '+' || i == 0) continue;
    const char prev = s[i - 1];
    if ((prev == 'e' || prev == 'E') && i >= 2 &&
        (std::isdigit(static_cast<unsigned char>(s[i - 2])) || s[i - 2] == '.')) {
      continue;
    }
    out.push_back(s.substr(start, i - start));
    start = i + 1;
  }
  out.push_back(s.substr(start));
  return out;
}

inline std::vector<double> parse_args(std::string_view args, std::string_view context) {
  std::vector<double> out;
  if (trim(args).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = args.find(',', start);
    out.push_back(number_or_throw(args.substr(start, comma - start), context));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline GridFunction build_atom(const Grid& g, std::string_view atom, const NamedFunctions& named) {
  atom = trim(atom);
  const auto colon = atom.find(':');
  const std::string_view name = trim(atom.substr(0, colon));
  const auto args = colon == std::string_view::npos ? std::vector<double>{} : parse_args(atom.substr(colon + 1), atom);
  auto want = [&](std::size_t n) {
    if (args.size() != n) {
      throw ValidationError("builder '" + std::string(name) + "' takes " + std::to_string(n) + " argument(s)");
    }
  };
  if (name == "const") {
    want(1);
    return build::constant(g, args[0]);
  }
  if (name == "x") {
    want(0);
    return build::coordinate(g);
  }
  if (name == "indicator") {
    want(2);
    return build::indicator(g, args[0], args[1]);
  }
  if (name == "gaussian") {
    want(2);
    return build::gaussian(g, args[0], args[1]);
  }
  if (name == "bump") {
    want(2);
    return build::smooth_bump(g, args[0], args[1]);
  }
  if (name == "log_spike") {
    want(1);
    return build::log_spike(g, args[0]);
  }
  if (name == "haar") {
    want(2);
    require(args[0] >= 0 && args[1] >= 1, "haar cube needs first >= 0 and length >= 1");
    return build::haar(g, Cube{static_cast<std::size_t>(args[0]), static_cast<std::size_t>(args[1])});
  }
  if (name == "power") {
    want(1);
    return build::power_weight(g, args[0]);
  }
  if (colon == std::string_view::npos) {
    if (auto it = named.find(name); it != named.end()) {
      require(it->second.grid == g, "named function '" + std::string(name) + "' lives on another grid");
      return it->second;
    }
  }
  throw ValidationError("unknown function builder '" + std::string(name) + "'");
}

} // namespace detail

inline GridFunction build_function(const Grid& g, std::string_view spec, const NamedFunctions& named = {}) {
  spec = detail::trim(spec);
  require(!spec.empty(), "empty function spec");
  if (spec.size() > 2 && spec[0] == 'M' && std::isdigit(static_cast<unsigned char>(spec[1]))) {
    const auto colon = spec.find(':');
    require(colon != std::string_view::npos, "maximal spec needs the form M<k>:<spec>");
    const double k = detail::number_or_throw(spec.substr(1, colon - 1), spec);
    require(k >= 1 && k == static_cast<int>(k), "maximal iteration count must be a positive integer");
    return iterate_maximal(build_function(g, spec.substr(colon + 1), named), static_cast<int>(k));
  }
  GridFunction total(g);
  for (std::string_view term : detail::split_terms(spec)) {
    term = detail::trim(term);
    double value = 0.0;
    if (detail::parse_number(term, value)) {
      total = total + value;
      continue;
    }
    double coef = 1.0;
    if (const auto star = term.find('*'); star != std::string_view::npos) {
      coef = detail::number_or_throw(term.substr(0, star), spec);
      term = term.substr(star + 1);
    }
    total = total + coef * detail::build_atom(g, term, named);
  }
  require_finite(total, "function spec '" + std::string(spec) + "'");
  return total;
}

} // namespace bumplab
