#pragma once

// Experiment configuration: JSON defaults, file overrides, flag overrides
// (flags win), and validation into a typed struct.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"

#include "bumplab/error.hpp"
#include "bumplab/grid.hpp"
#include "bumplab/weights.hpp"

namespace bumplab {

struct ExperimentConfig {
  double L = 2.0;
  std::size_t m = 256;

  std::string u = "1+gaussian:0,0.3";
  std::string v = "M5:u";

  double p = 2.0;
  double delta = 1.0;
  std::string preset = "comm";
  std::optional<double> a_left;
  std::optional<double> a_right;
  std::string family = "dyadic";

  std::string kernel = "hilbert";
  double eta_cells = 16.0;
  std::string op = "commutator";

  std::string b = "bump:0,0.25";
  std::string b_bmo = "log_spike:1e-3";

  std::string f = "indicator:0,1";
  std::size_t cube_first = 0;
  std::size_t cube_cells = 0; ///< 0 means the whole domain

  double orlicz_p = 2.0;
  double orlicz_a = 0.0;
  double rel_tol = kDefaultRelTol;

  std::size_t count = 32;
  std::uint64_t seed = 7;
  std::vector<double> N_list; ///< empty means {L/4, L/2, 3L/4}
  std::vector<long> shift_list{1, 2, 3};
  bool allow_large_shift = false;
  double N0 = 0.0; ///< 0 skips the tail constant

  std::vector<std::size_t> K_list; ///< empty means {m/8}

  std::string out_dir = "bumplab_out";
  std::vector<std::string> formats{"json", "csv"};

  bool wants(const std::string& format) const {
    for (const auto& f : formats) {
      if (f == format) return true;
    }
    return false;
  }
  std::vector<double> resolved_N_list() const {
    return N_list.empty() ? std::vector<double>{0.25 * L, 0.5 * L, 0.75 * L} : N_list;
  }
  std::vector<std::size_t> resolved_K_list() const {
    return K_list.empty() ? std::vector<std::size_t>{std::max<std::size_t>(m / 8, 1)} : K_list;
  }
};

namespace detail {

using cjson = nlohmann::ordered_json;

inline cjson optional_json(const std::optional<double>& x) { return x ? cjson(*x) : cjson(nullptr); }

// Every key of `patch` must already exist in `schema` (objects recurse).
inline void check_known_keys(const cjson& schema, const cjson& patch, const std::string& where) {
  require(patch.is_object(), "config section '" + where + "' must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const auto known = schema.find(it.key());
    const std::string path = where.empty() ? it.key() : where + "." + it.key();
    require(known != schema.end(), "unknown config key '" + path + "'");
    if (known->is_object()) check_known_keys(*known, it.value(), path);
  }
}

inline void deep_merge(cjson& base, const cjson& patch) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object()) {
      deep_merge(base[it.key()], it.value());
    } else {
      base[it.key()] = it.value();
    }
  }
}

// Integers must be written as integers; nlohmann would truncate 2.5 to 2.
inline void check_integers(const cjson& x, bool nonnegative, const std::string& name) {
  if (x.is_array()) {
    for (const auto& e : x) check_integers(e, nonnegative, name);
    return;
  }
  require(x.is_number_integer(), "config value " + name + " must be an integer");
  require(!nonnegative || x.is_number_unsigned(), "config value " + name + " must be nonnegative");
}

template <class T>
struct IntegerTraits {
  static constexpr bool integral = std::is_integral_v<T> && !std::is_same_v<T, bool>;
  static constexpr bool is_unsigned = std::is_unsigned_v<T>;
};

template <class T>
struct IntegerTraits<std::vector<T>> : IntegerTraits<T> {};

template <class T>
T get_path(const cjson& j, std::initializer_list<const char*> path) {
  std::string name;
  const cjson* node = &j;
  try {
    for (const char* key : path) {
      name += name.empty() ? key : std::string(".") + key;
      node = &node->at(key);
    }
    if constexpr (IntegerTraits<T>::integral) check_integers(*node, IntegerTraits<T>::is_unsigned, name);
    return node->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config value " + name + ": " + e.what());
  }
}

template <class T>
T get_as(const cjson& j, const char* section, const char* key) {
  return get_path<T>(j, {section, key});
}

template <class T>
T get_nested(const cjson& j, const char* a, const char* b, const char* key) {
  return get_path<T>(j, {a, b, key});
}

inline std::optional<double> get_optional(const cjson& j, const char* section, const char* key) {
  const cjson& x = j.at(section).at(key);
  if (x.is_null()) return std::nullopt;
  require(x.is_number(), std::string("config value ") + section + "." + key + " must be a number or null");
  return x.get<double>();
}

} // namespace detail

inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  using detail::cjson;
  return cjson{
      {"grid", {{"L", c.L}, {"m", c.m}}},
      {"weights", {{"u", c.u}, {"v", c.v}}},
      {"bump",
       {{"p", c.p},
        {"delta", c.delta},
        {"preset", c.preset},
        {"a_left", detail::optional_json(c.a_left)},
        {"a_right", detail::optional_json(c.a_right)},
        {"family", c.family}}},
      {"operator", {{"kernel", c.kernel}, {"eta_cells", c.eta_cells}, {"op", c.op}}},
      {"symbol", {{"b", c.b}, {"b_bmo", c.b_bmo}}},
      {"input", {{"f", c.f}, {"cube", {{"first", c.cube_first}, {"cells", c.cube_cells}}}}},
      {"orlicz", {{"p", c.orlicz_p}, {"a", c.orlicz_a}, {"rel_tol", c.rel_tol}}},
      {"probes",
       {{"kr",
         {{"count", c.count},
          {"seed", c.seed},
          {"N_list", c.N_list},
          {"shift_list", c.shift_list},
          {"allow_large_shift", c.allow_large_shift}}},
        {"tail", {{"N0", c.N0}}},
        {"spectral", {{"K_list", c.K_list}}}}},
      {"output", {{"dir", c.out_dir}, {"formats", c.formats}}},
  };
}

/// Checks ranges that do not need a grid function to be built.
inline void validate(const ExperimentConfig& c) {
  make_grid(c.L, c.m);
  require(c.p > 1.0 && std::isfinite(c.p), "bump.p must exceed 1");
  require(c.delta > 0.0 && std::isfinite(c.delta), "bump.delta must be positive");
  const BumpPreset preset = parse_preset(c.preset);
  if (preset == BumpPreset::custom) require(c.a_left && c.a_right, "custom preset needs bump.a_left and bump.a_right");
  require(!c.a_left || *c.a_left >= 0.0, "bump.a_left must be nonnegative");
  require(!c.a_right || *c.a_right >= 0.0, "bump.a_right must be nonnegative");
  require(c.family == "dyadic" || c.family == "dyadic+half-shift",
          "bump.family must be 'dyadic' or 'dyadic+half-shift'");
  require(c.kernel == "hilbert", "operator.kernel must be 'hilbert'");
  require(c.eta_cells >= 2.0 && std::isfinite(c.eta_cells), "operator.eta_cells must be at least 2");
  require(c.op == "M" || c.op == "Teta" || c.op == "Tsharp" || c.op == "commutator",
          "operator.op must be one of M, Teta, Tsharp, commutator");
  require(c.cube_cells == 0 || c.cube_first + c.cube_cells <= c.m, "input.cube lies outside the grid");
  require(c.orlicz_p > 1.0, "orlicz.p must exceed 1");
  require(c.orlicz_a >= 0.0, "orlicz.a must be nonnegative");
  require(c.rel_tol > 0.0 && c.rel_tol < 1.0, "orlicz.rel_tol must lie in (0, 1)");
  require(c.count >= 1, "probes.kr.count must be at least 1");
  for (double N : c.N_list) require(N >= 0.0, "probes.kr.N_list entries must be nonnegative");
  for (long s : c.shift_list) require(std::abs(s) < static_cast<long>(c.m), "probes.kr.shift_list entries must be smaller than the grid");
  require(c.N0 >= 0.0, "probes.tail.N0 must be nonnegative");
  for (std::size_t K : c.K_list) require(K >= 1 && K <= c.m, "probes.spectral.K_list entries must lie in [1, m]");
  require(!c.out_dir.empty(), "output.dir must not be empty");
  for (const auto& f : c.formats) require(f == "json" || f == "csv", "output.formats entries must be 'json' or 'csv'");
}

inline ExperimentConfig from_json(const nlohmann::ordered_json& j) {
  using detail::get_as;
  using detail::get_nested;
  ExperimentConfig c;
  detail::check_known_keys(to_json(c), j, "");
  nlohmann::ordered_json full = to_json(c);
  detail::deep_merge(full, j);
  c.L = get_as<double>(full, "grid", "L");
  c.m = get_as<std::size_t>(full, "grid", "m");
  c.u = get_as<std::string>(full, "weights", "u");
  c.v = get_as<std::string>(full, "weights", "v");
  c.p = get_as<double>(full, "bump", "p");
  c.delta = get_as<double>(full, "bump", "delta");
  c.preset = get_as<std::string>(full, "bump", "preset");
  c.a_left = detail::get_optional(full, "bump", "a_left");
  c.a_right = detail::get_optional(full, "bump", "a_right");
  c.family = get_as<std::string>(full, "bump", "family");
  c.kernel = get_as<std::string>(full, "operator", "kernel");
  c.eta_cells = get_as<double>(full, "operator", "eta_cells");
  c.op = get_as<std::string>(full, "operator", "op");
  c.b = get_as<std::string>(full, "symbol", "b");
  c.b_bmo = get_as<std::string>(full, "symbol", "b_bmo");
  c.f = get_as<std::string>(full, "input", "f");
  c.cube_first = get_nested<std::size_t>(full, "input", "cube", "first");
  c.cube_cells = get_nested<std::size_t>(full, "input", "cube", "cells");
  c.orlicz_p = get_as<double>(full, "orlicz", "p");
  c.orlicz_a = get_as<double>(full, "orlicz", "a");
  c.rel_tol = get_as<double>(full, "orlicz", "rel_tol");
  c.count = get_nested<std::size_t>(full, "probes", "kr", "count");
  c.seed = get_nested<std::uint64_t>(full, "probes", "kr", "seed");
  c.N_list = get_nested<std::vector<double>>(full, "probes", "kr", "N_list");
  c.shift_list = get_nested<std::vector<long>>(full, "probes", "kr", "shift_list");
  c.allow_large_shift = get_nested<bool>(full, "probes", "kr", "allow_large_shift");
  c.N0 = get_nested<double>(full, "probes", "tail", "N0");
  c.K_list = get_nested<std::vector<std::size_t>>(full, "probes", "spectral", "K_list");
  c.out_dir = get_as<std::string>(full, "output", "dir");
  c.formats = get_as<std::vector<std::string>>(full, "output", "formats");
  validate(c);
  return c;
}

/// Reads a config file. A report written by the CLI is accepted too: its
/// embedded "config" object is used.
inline nlohmann::ordered_json read_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  require(static_cast<bool>(is), "cannot read config file " + path.string());
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  require(j.is_object(), "config file must hold a JSON object");
  if (j.contains("config") && j.contains("command")) return j.at("config");
  return j;
}

/// defaults <- file <- flags, with flags winning.
inline ExperimentConfig resolve_config(const nlohmann::ordered_json& file, const nlohmann::ordered_json& flags) {
  ExperimentConfig defaults;
  detail::check_known_keys(to_json(defaults), file, "");
  detail::check_known_keys(to_json(defaults), flags, "");
  nlohmann::ordered_json merged = nlohmann::ordered_json::object();
  detail::deep_merge(merged, file);
  detail::deep_merge(merged, flags);
  return from_json(merged);
}

} // namespace bumplab
