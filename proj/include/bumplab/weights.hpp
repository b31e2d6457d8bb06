#pragma once

// Weights and the sup-over-cube constants: A_p, two-weight A_p, and the
// logarithmic bump conditions for M, for Calderon-Zygmund operators, and for
// their commutators.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "bumplab/error.hpp"
#include "bumplab/grid.hpp"
#include "bumplab/operators.hpp"
#include "bumplab/orlicz.hpp"
#include "bumplab/parallel.hpp"

namespace bumplab {

/// u >= 0 with some positive cell; v > 0 on every cell.
struct WeightPair {
  GridFunction u;
  GridFunction v;
};

inline WeightPair make_weight_pair(GridFunction u, GridFunction v) {
  check_same_grid(u, v);
  require_finite(u, "weight u");
  require_finite(v, "weight v");
  bool positive = false;
  for (double x : u.values) {
    require(x >= 0.0, "weight u must be nonnegative");
    positive = positive || x > 0.0;
  }
  require(positive, "weight u must be positive somewhere");
  for (double x : v.values) require(x > 0.0, "weight v must be positive on every cell");
  return {std::move(u), std::move(v)};
}

enum class BumpPreset { max, czo, comm, custom };

inline std::string to_string(BumpPreset p) {
  switch (p) {
  case BumpPreset::max: return "max";
  case BumpPreset::czo: return "czo";
  case BumpPreset::comm: return "comm";
  case BumpPreset::custom: return "custom";
  }
  return "custom";
}

inline BumpPreset parse_preset(const std::string& s) {
  if (s == "max") return BumpPreset::max;
  if (s == "czo") return BumpPreset::czo;
  if (s == "comm") return BumpPreset::comm;
  if (s == "custom") return BumpPreset::custom;
  throw ValidationError("unknown bump preset '" + s + "' (expected max, czo, comm or custom)");
}

/// Log exponents for the u side (a_left) and v side (a_right). For the max
/// preset the u side is the plain average and a_left is unused.
struct BumpSpec {
  double p = 2.0;
  double delta = 1.0;
  BumpPreset preset = BumpPreset::comm;
  double a_left = 0.0;
  double a_right = 0.0;
};

inline BumpSpec make_bump_spec(BumpPreset preset, double p, double delta) {
  require(std::isfinite(p) && p > 1.0, "bump exponent p must exceed 1");
  require(std::isfinite(delta) && delta > 0.0, "bump delta must be positive");
  require(preset != BumpPreset::custom, "custom bumps take explicit exponents");
  const double pp = p / (p - 1.0);
  BumpSpec s{p, delta, preset, 0.0, 0.0};
  switch (preset) {
  case BumpPreset::max:
    s.a_right = pp - 1.0 + delta;
    break;
  case BumpPreset::czo:
    s.a_left = p - 1.0 + delta;
    s.a_right = pp - 1.0 + delta;
    break;
  case BumpPreset::comm:
    s.a_left = 2.0 * p - 1.0 + delta;
    s.a_right = 2.0 * pp - 1.0 + delta;
    break;
  case BumpPreset::custom:
    break;
  }
  return s;
}

inline BumpSpec make_custom_bump(double p, double a_left, double a_right, double delta = 1.0) {
  require(std::isfinite(p) && p > 1.0, "bump exponent p must exceed 1");
  require(a_left >= 0.0 && a_right >= 0.0, "bump log exponents must be nonnegative");
  return {p, delta, BumpPreset::custom, a_left, a_right};
}

struct BumpReport {
  double constant = 0.0;
  Cube argmax;
  std::string family;
  std::vector<double> per_cube; ///< aligned with the family's cube list
};

namespace detail {

template <class PerCube>
BumpReport sup_over_family(const CubeFamily& family, PerCube per_cube) {
  require(!family.cubes.empty(), "cube family is empty");
  BumpReport r;
  r.family = family.name;
  r.per_cube.resize(family.cubes.size());
  parallel_for(family.cubes.size(), [&](std::size_t c) { r.per_cube[c] = per_cube(family.cubes[c]); });
  std::size_t best = 0;
  for (std::size_t c = 1; c < r.per_cube.size(); ++c) {
    if (r.per_cube[c] > r.per_cube[best]) best = c;
  }
  r.constant = r.per_cube[best];
  r.argmax = family.cubes[best];
  return r;
}

inline void require_positive(const GridFunction& w, const std::string& what) {
  for (double x : w.values) require(x > 0.0 && std::isfinite(x), what + " must be positive and finite on every cell");
}

} // namespace detail

/// sup_Q (avg_Q u)(avg_Q v^{1-p'})^{p-1}.
inline BumpReport two_weight_ap(const WeightPair& pair, double p, const CubeFamily& family) {
  require(std::isfinite(p) && p > 1.0, "A_p exponent must exceed 1");
  check_same_grid(pair.u, pair.v);
  detail::require_positive(pair.v, "weight v");
  const double pp = p / (p - 1.0);
  const GridFunction dual = map(pair.v, [pp](double x) { return std::pow(x, 1.0 - pp); });
  return detail::sup_over_family(family, [&](const Cube& q) {
    return average(pair.u, q) * std::pow(average(dual, q), p - 1.0);
  });
}

inline BumpReport ap_constant(const GridFunction& w, double p, const CubeFamily& family) {
  detail::require_positive(w, "A_p weight");
  return two_weight_ap(WeightPair{w, w}, p, family);
}

/// sup_Q F_left(Q) F_right(Q), with F_right = ||v^{-1/p}||_{L^{p'}(log L)^{a_right}, Q}
/// and F_left = avg_Q u for the max preset, ||u^{1/p}||_{L^p(log L)^{a_left}, Q} otherwise.
inline BumpReport bump_constant(const WeightPair& pair, const BumpSpec& spec, const CubeFamily& family,
                                double rel_tol = kDefaultRelTol) {
  check_same_grid(pair.u, pair.v);
  detail::require_positive(pair.v, "weight v");
  const double p = spec.p;
  const YoungFunction right_phi = make_young(p / (p - 1.0), spec.a_right);
  const YoungFunction left_phi = make_young(p, spec.a_left);
  const GridFunction u_root = map(pair.u, [p](double x) { return std::pow(x, 1.0 / p); });
  const GridFunction v_root = map(pair.v, [p](double x) { return std::pow(x, -1.0 / p); });
  const bool plain_left = spec.preset == BumpPreset::max;
  return detail::sup_over_family(family, [&](const Cube& q) {
    const double left = plain_left ? average(pair.u, q) : orlicz_average(u_root, q, left_phi, rel_tol).value;
    if (left == 0.0) return 0.0;
    return left * orlicz_average(v_root, q, right_phi, rel_tol).value;
  });
}

/// M^k u, the k-fold maximal function.
inline GridFunction iterate_maximal(const GridFunction& u, int k) {
  require(k >= 1, "maximal iteration count must be positive");
  for (double x : u.values) require(x >= 0.0, "iterate_maximal expects a nonnegative weight");
  GridFunction v = u;
  for (int i = 0; i < k; ++i) v = maximal_fn(v);
  return v;
}

/// floor(2p) + 1 iterations make (u, M^k u) satisfy the commutator bump.
inline int commutator_iteration_count(double p) { return static_cast<int>(std::floor(2.0 * p)) + 1; }

} // namespace bumplab
