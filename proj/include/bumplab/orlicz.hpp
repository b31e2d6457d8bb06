#pragma once

// Young functions t^p [log(e + t)]^a, Luxemburg-type Orlicz averages over
// cubes, and mean oscillation.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "bumplab/error.hpp"
#include "bumplab/grid.hpp"

namespace bumplab {

struct YoungFunction {
  double p = 2.0;
  double a = 0.0;

  double operator()(double t) const {
    const double power = p == 2.0 ? t * t : std::pow(t, p);
    if (a == 0.0) return power;
    return power * std::pow(std::log(std::numbers::e + t), a);
  }
  /// Hoelder conjugate p' = p / (p - 1).
  double conjugate() const { return p / (p - 1.0); }
};

inline YoungFunction make_young(double p, double a) {
  require(std::isfinite(p) && p > 1.0, "Young function needs p > 1");
  // Negative log exponents are valid Orlicz functions but break the monotone
  // bracketing below.
  require(std::isfinite(a) && a >= 0.0, "Young function needs a >= 0");
  return {p, a};
}

inline double young_eval(const YoungFunction& phi, double t) {
  require(t >= 0.0, "Young functions are evaluated at t >= 0");
  return phi(t);
}

/// The t* with phi(t*) = 1. A constant c has Orlicz average c / t*.
inline double young_inverse_at_one(const YoungFunction& phi) {
  double lo = 0.0, hi = 1.0;
  while (phi(hi) < 1.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (phi(mid) < 1.0 ? lo : hi) = mid;
  }
  return std::abs(phi(lo) - 1.0) < std::abs(phi(hi) - 1.0) ? lo : hi;
}

struct OrliczAverage {
  double value = 0.0;
  int iterations = 0;
  double lower = 0.0; ///< largest lambda seen with mean phi(|f|/lambda) > 1
  double upper = 0.0; ///< smallest lambda seen with mean phi(|f|/lambda) <= 1
};

inline constexpr double kDefaultRelTol = 1e-10;
inline constexpr int kOrliczIterationCap = 200;

/// inf{lambda > 0 : mean phi(|f|/lambda) <= 1} over the given cell values.
///
/// lambda -> mean phi(|f|/lambda) is nonincreasing, so the infimum is
/// bracketed by doubling/halving from max|f| and then bisected until
/// upper - lower <= rel_tol * upper. The returned value is `upper`, which is
/// feasible; upper * (1 - rel_tol) is not.
inline OrliczAverage orlicz_average(std::span<const double> values, const YoungFunction& phi,
                                    double rel_tol = kDefaultRelTol) {
  require(rel_tol > 0.0 && rel_tol <= 1e-3, "Orlicz rel_tol must lie in (0, 1e-3]");
  require(!values.empty(), "Orlicz average over an empty cube");
  double peak = 0.0;
  for (double x : values) peak = std::max(peak, std::abs(x));
  if (peak == 0.0) return {};

  const double n = static_cast<double>(values.size());
  auto mean_phi = [&](double lambda) {
    double s = 0.0;
    for (double x : values) s += phi(std::abs(x) / lambda);
    const double m = s / n;
    if (!std::isfinite(m)) {
      throw NumericalError("Young function overflow while bracketing the Orlicz average; rescale the input");
    }
    return m;
  };

  OrliczAverage r;
  double lo = peak, hi = peak;
  if (mean_phi(peak) <= 1.0) {
    do {
      if (++r.iterations > kOrliczIterationCap) throw NumericalError("Orlicz bracketing did not terminate");
      hi = lo;
      lo *= 0.5;
    } while (mean_phi(lo) <= 1.0);
  } else {
    do {
      if (++r.iterations > kOrliczIterationCap) throw NumericalError("Orlicz bracketing did not terminate");
      lo = hi;
      hi *= 2.0;
      if (!std::isfinite(hi)) throw NumericalError("Orlicz bracket overflowed; rescale the input");
    } while (mean_phi(hi) > 1.0);
  }
  while (hi - lo > rel_tol * hi) {
    if (++r.iterations > kOrliczIterationCap) throw NumericalError("Orlicz bisection did not converge");
    const double mid = 0.5 * (lo + hi);
    (mean_phi(mid) <= 1.0 ? hi : lo) = mid;
  }
  r.value = hi;
  r.lower = lo;
  r.upper = hi;
  return r;
}

inline OrliczAverage orlicz_average(const GridFunction& f, const Cube& q, const YoungFunction& phi,
                                    double rel_tol = kDefaultRelTol) {
  check_cube(f.grid, q);
  return orlicz_average(f.view(q), phi, rel_tol);
}

/// mean over q of |b - mean_q b|.
inline double mean_oscillation(const GridFunction& b, const Cube& q) {
  const double mean = average(b, q);
  double s = 0.0;
  for (std::size_t i = q.first; i < q.end(); ++i) s += std::abs(b[i] - mean);
  return s / static_cast<double>(q.length);
}

inline double bmo_norm(const GridFunction& b, std::span<const Cube> cubes) {
  require(!cubes.empty(), "BMO norm needs at least one cube");
  double best = 0.0;
  for (const Cube& q : cubes) best = std::max(best, mean_oscillation(b, q));
  return best;
}

inline double bmo_norm(const GridFunction& b, const CubeFamily& family) { return bmo_norm(b, family.cubes); }

} // namespace bumplab
