#pragma once

// Empirical Kolmogorov-Riesz probes for F = [b, T^eta](unit ball of L^p(v))
// in L^p(u): boundedness, uniform decay at infinity, and translation
// equicontinuity, plus the two-term translation decomposition and the
// pointwise tail constant.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bumplab/error.hpp"
#include "bumplab/grid.hpp"
#include "bumplab/operators.hpp"
#include "bumplab/parallel.hpp"
#include "bumplab/random.hpp"

namespace bumplab {

struct UnitBallSample {
  std::vector<GridFunction> functions;
  std::vector<std::string> tags;
  std::uint64_t seed = 0;
};

/// f / ||f||_{L^p(v)}.
inline GridFunction normalize_in_lp(const GridFunction& f, const GridFunction& v, double p) {
  const double n = lp_norm_weighted(f, v, p);
  require(n > 0.0 && std::isfinite(n), "cannot normalize a function of zero or infinite norm");
  return (1.0 / n) * f;
}

namespace detail {

// Generator i % 4: indicator, Haar, Gaussian, random piecewise constant.
inline std::pair<GridFunction, std::string> draw_test_function(const Grid& g, StreamRng& rng, std::size_t kind) {
  const long m = static_cast<long>(g.cells);
  const double L = g.half_width;
  switch (kind % 4) {
  case 0: {
    const long len = rng.integer(1, m / 4);
    const long first = rng.integer(0, m - len);
    GridFunction f(g);
    for (long i = first; i < first + len; ++i) f[static_cast<std::size_t>(i)] = 1.0;
    return {f, "indicator"};
  }
  case 1: {
    const long levels = static_cast<long>(std::log2(static_cast<double>(m)));
    const std::size_t len = std::size_t{1} << rng.integer(1, std::max(1L, levels - 2));
    const std::size_t first = len * static_cast<std::size_t>(rng.integer(0, m / static_cast<long>(len) - 1));
    return {build::haar(g, Cube{first, len}), "haar"};
  }
  case 2: {
    const double center = rng.uniform(-0.75 * L, 0.75 * L);
    const double sigma = rng.uniform(2.0 * g.cell_width, 0.25 * L);
    return {build::gaussian(g, center, sigma), "gaussian"};
  }
  default: {
    const long pieces = rng.integer(2, 16);
    std::vector<long> cuts{0, m};
    for (long c = 1; c < pieces; ++c) cuts.push_back(rng.integer(1, m - 1));
    std::sort(cuts.begin(), cuts.end());
    GridFunction f(g);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double value = rng.uniform(-1.0, 1.0);
      for (long i = cuts[c]; i < cuts[c + 1]; ++i) f[static_cast<std::size_t>(i)] = value;
    }
    if (max_abs(f) == 0.0) f[0] = 1.0;
    return {f, "piecewise"};
  }
  }
}

} // namespace detail

/// count functions normalized in L^p(v). Member i depends only on (seed, i),
/// so a larger sample with the same seed extends a smaller one.
inline UnitBallSample sample_unit_ball(const GridFunction& v, double p, std::size_t count, std::uint64_t seed) {
  require(count >= 1, "unit-ball sample needs at least one function");
  require(p >= 1.0, "L^p exponent must satisfy p >= 1");
  for (double x : v.values) require(x > 0.0, "weight v must be positive on every cell");
  UnitBallSample s;
  s.seed = seed;
  s.functions.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    StreamRng rng(seed, i);
    auto [f, tag] = detail::draw_test_function(v.grid, rng, i);
    s.functions.push_back(normalize_in_lp(f, v, p));
    s.tags.push_back(std::move(tag));
  }
  return s;
}

// ---------------------------------------------------------------------------

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

struct KRReport {
  double bound_sup = 0.0;              ///< sup ||[b,T^eta] f||_{L^p(u)}
  std::vector<CurvePoint> tail_curve;    ///< (N, sup tail mass beyond |x| > N)
  std::vector<CurvePoint> modulus_curve; ///< (|shift|, sup translation error)
  double slope = 0.0;                    ///< least-squares slope of log modulus vs log |shift|
};

/// Least-squares slope of log y against log x over points with x, y > 0.
inline double loglog_slope(const std::vector<CurvePoint>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& pt : pts) {
    if (pt.x <= 0.0 || pt.y <= 0.0) continue;
    const double lx = std::log(pt.x), ly = std::log(pt.y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

namespace detail {

template <PairKernel Kernel>
std::vector<GridFunction> commutator_images(const UnitBallSample& sample, const GridFunction& b,
                                            const TruncationSpec& t, const Kernel& k) {
  std::vector<GridFunction> out;
  out.reserve(sample.functions.size());
  for (const auto& f : sample.functions) out.push_back(commutator(b, f, t, k));
  return out;
}

inline double tail_mass(const GridFunction& g, const GridFunction& u, double p, double N) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(g.grid.center(i)) <= N || u[i] == 0.0 || g[i] == 0.0) continue;
    s += std::pow(std::abs(g[i]), p) * u[i];
  }
  return std::pow(s * g.grid.cell_width, 1.0 / p);
}

inline void check_shifts(const Grid& g, const TruncationSpec& t, std::span<const long> shift_cells,
                         bool allow_large_shift) {
  for (long s : shift_cells) {
    require(allow_large_shift || std::abs(static_cast<double>(s)) * g.cell_width < 0.25 * t.eta,
            "shift of " + std::to_string(s) + " cells is not below eta/4");
    require(std::abs(s) < static_cast<long>(g.cells), "shift must be smaller than the grid");
  }
}

} // namespace detail

/// Condition (a): sup over the sample of ||[b,T^eta] f||_{L^p(u)}.
template <PairKernel Kernel>
double kr_bounded(const UnitBallSample& sample, const GridFunction& b, const TruncationSpec& t, const Kernel& k,
                  const GridFunction& u, double p) {
  double best = 0.0;
  for (const auto& f : sample.functions) best = std::max(best, lp_norm_weighted(commutator(b, f, t, k), u, p));
  return best;
}

/// Condition (b): for each N, sup over the sample of (int_{|x|>N} |[b,T^eta] f|^p u)^{1/p}.
template <PairKernel Kernel>
std::vector<CurvePoint> kr_tail(const UnitBallSample& sample, const GridFunction& b, const TruncationSpec& t,
                                const Kernel& k, const GridFunction& u, double p, std::span<const double> N_list) {
  for (double N : N_list) require(N >= 0.0 && N < b.grid.half_width, "tail radius N must lie in [0, L)");
  const auto images = detail::commutator_images(sample, b, t, k);
  std::vector<CurvePoint> curve;
  for (double N : N_list) {
    double best = 0.0;
    for (const auto& g : images) best = std::max(best, detail::tail_mass(g, u, p, N));
    curve.push_back({N, best});
  }
  return curve;
}

/// Condition (c): for each shift s (in cells), sup over the sample of
/// ||[b,T^eta] f(. + s h) - [b,T^eta] f||_{L^p(u)}. Shifts must stay below
/// eta/4 unless allow_large_shift is set.
template <PairKernel Kernel>
std::vector<CurvePoint> kr_equicontinuity(const UnitBallSample& sample, const GridFunction& b,
                                          const TruncationSpec& t, const Kernel& k, const GridFunction& u, double p,
                                          std::span<const long> shift_cells, bool allow_large_shift = false) {
  detail::check_shifts(b.grid, t, shift_cells, allow_large_shift);
  const auto images = detail::commutator_images(sample, b, t, k);
  std::vector<CurvePoint> curve;
  for (long s : shift_cells) {
    double best = 0.0;
    if (s != 0) {
      for (std::size_t n = 0; n < images.size(); ++n) {
        const GridFunction moved = commutator_at_shift(b, sample.functions[n], t, k, s);
        best = std::max(best, lp_norm_weighted(moved - images[n], u, p));
      }
    }
    curve.push_back({std::abs(static_cast<double>(s)) * b.grid.cell_width, best});
  }
  return curve;
}

template <PairKernel Kernel>
KRReport kr_probe(const UnitBallSample& sample, const GridFunction& b, const TruncationSpec& t, const Kernel& k,
                  const GridFunction& u, double p, std::span<const double> N_list, std::span<const long> shift_cells,
                  bool allow_large_shift = false) {
  KRReport r;
  r.bound_sup = kr_bounded(sample, b, t, k, u, p);
  r.tail_curve = kr_tail(sample, b, t, k, u, p, N_list);
  r.modulus_curve = kr_equicontinuity(sample, b, t, k, u, p, shift_cells, allow_large_shift);
  r.slope = loglog_slope(r.modulus_curve);
  return r;
}

// ---------------------------------------------------------------------------

/// [b,T^eta] f(x + s) - [b,T^eta] f(x) = Af(x) + Bf(x), where
/// Af(x) = (b(x+s) - b(x)) T^eta f(x) and
/// Bf(x) = sum_j (b_j - b(x+s)) (K_eta(x, x_j) - K_eta(x+s, x_j)) f_j h.
struct ShiftDecomposition {
  GridFunction Af;
  GridFunction Bf;
  double shift = 0.0;
};

template <PairKernel Kernel>
ShiftDecomposition shift_decomposition(const GridFunction& b, const GridFunction& f, const TruncationSpec& t,
                                       const Kernel& k, long shift_cells, bool allow_large_shift = false) {
  check_same_grid(b, f);
  const long shifts[] = {shift_cells};
  detail::check_shifts(b.grid, t, shifts, allow_large_shift);
  const Grid& g = f.grid;
  const double s = static_cast<double>(shift_cells) * g.cell_width;
  const GridFunction b_shift = shift_clamped(b, shift_cells);
  const GridFunction tf = apply_truncated(f, t, k);

  ShiftDecomposition d{GridFunction(g), GridFunction(g), s};
  for (std::size_t i = 0; i < g.cells; ++i) d.Af[i] = (b_shift[i] - b[i]) * tf[i];
  parallel_for(g.cells, [&](std::size_t i) {
    const double x = g.center(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < g.cells; ++j) {
      if (f[j] == 0.0) continue;
      const double y = g.center(j);
      acc += (b[j] - b_shift[i]) * (truncated_kernel(k, t, x, y) - truncated_kernel(k, t, x + s, y)) * f[j];
    }
    d.Bf[i] = acc * g.cell_width;
  });
  return d;
}

/// Largest |b_{i+1} - b_i| / h; bounds |b(x+s) - b(x)| <= |s| * this on the grid.
inline double max_discrete_gradient(const GridFunction& b) {
  double g = 0.0;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) g = std::max(g, std::abs(b[i + 1] - b[i]));
  return g / b.grid.cell_width;
}

/// Factor D with sum_{|x_i-x_j| >= eta/2} |f_j| h / |x_i-x_j|^2 <= (D/eta) Mf(x_i)
/// on the grid: dyadic annuli 2^{k-1} eta <= |x-y| < 2^k eta sit inside
/// grid-aligned intervals of length at most 2^{k+1} eta + h.
inline double dyadic_annulus_factor(const Grid& g, const TruncationSpec& t) {
  return 16.0 + 16.0 * g.cell_width / (3.0 * t.eta);
}

// ---------------------------------------------------------------------------

struct TailReport {
  double C_bv = 0.0;          ///< sup of |[b,T^eta] f(x)| |x| over the sample and |x| > N0
  double N0 = 0.0;
  double support_radius = 0.0; ///< sup{|y| : y in supp b}
  double v_certificate = 0.0;  ///< (int_{supp b} v^{-p'/p})^{1/p'}
};

inline double support_radius(const GridFunction& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] != 0.0) r = std::max(r, std::abs(b.grid.center(i)) + 0.5 * b.grid.cell_width);
  }
  return r;
}

template <PairKernel Kernel>
TailReport tail_constant(const GridFunction& b, const TruncationSpec& t, const Kernel& k, const GridFunction& v,
                         double p, const UnitBallSample& sample, double N0) {
  check_same_grid(b, v);
  require(p > 1.0, "tail constant needs p > 1");
  TailReport r;
  r.N0 = N0;
  r.support_radius = support_radius(b);
  require(N0 > 2.0 * r.support_radius, "N0 must exceed twice the support radius of b");
  require(N0 < b.grid.half_width, "N0 must lie inside the grid");

  const double pp = p / (p - 1.0);
  double cert = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] != 0.0) cert += std::pow(v[i], -pp / p);
  }
  r.v_certificate = std::pow(cert * b.grid.cell_width, 1.0 / pp);

  for (const auto& f : sample.functions) {
    const GridFunction g = commutator(b, f, t, k);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = std::abs(g.grid.center(i));
      if (x > N0) r.C_bv = std::max(r.C_bv, std::abs(g[i]) * x);
    }
  }
  return r;
}

} // namespace bumplab
