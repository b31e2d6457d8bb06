#pragma once

// Hardy-Littlewood maximal operator, smoothly truncated singular integrals
// T^eta, the sharp maximal truncation T#, and commutators [b, T^eta].
// Quadrature is the midpoint rule on cells; every singular operator evaluated
// here is truncated away from the diagonal, so no principal value is needed.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "bumplab/error.hpp"
#include "bumplab/grid.hpp"
#include "bumplab/parallel.hpp"

namespace bumplab {

/// A kernel K(x, y) defined off the diagonal.
template <class K>
concept PairKernel = requires(const K& k, double x, double y) {
  { k(x, y) } -> std::convertible_to<double>;
  { k.name() } -> std::convertible_to<std::string>;
};

/// K(x, y) = 1 / (pi (x - y)). |K| <= (1/pi)/|x-y| and |dK/dx| <= (1/pi)/|x-y|^2.
struct HilbertKernel {
  double operator()(double x, double y) const { return std::numbers::inv_pi / (x - y); }
  std::string name() const { return "hilbert"; }
  double size_constant() const { return std::numbers::inv_pi; }
  double smoothness_constant() const { return std::numbers::inv_pi; }
};

// --- smooth cutoff ---------------------------------------------------------

/// 0 for r <= 1, 1 for r >= 2, cubic smoothstep 3t^2 - 2t^3 (t = r - 1) between.
inline double cutoff_psi(double r) {
  if (r <= 1.0) return 0.0;
  if (r >= 2.0) return 1.0;
  const double t = r - 1.0;
  return t * t * (3.0 - 2.0 * t);
}

inline double cutoff_psi_derivative(double r) {
  if (r <= 1.0 || r >= 2.0) return 0.0;
  const double t = r - 1.0;
  return 6.0 * t * (1.0 - t);
}

struct TruncationSpec {
  double eta = 0.0;
};

inline TruncationSpec truncation_in_cells(const Grid& g, double cells) {
  return {cells * g.cell_width};
}

/// The truncation must resolve at least two cells.
inline void check_truncation(const Grid& g, const TruncationSpec& t) {
  require(std::isfinite(t.eta) && t.eta >= 2.0 * g.cell_width * (1.0 - 1e-12),
          "truncation radius eta must be at least two cells");
}

/// K_eta(x, y) = psi(|x-y|/eta) K(x, y): zero for |x-y| <= eta, equal to K
/// (bit for bit) for |x-y| >= 2 eta.
template <PairKernel Kernel>
double truncated_kernel(const Kernel& k, const TruncationSpec& t, double x, double y) {
  const double r = std::abs(x - y) / t.eta;
  if (r <= 1.0) return 0.0;
  if (r >= 2.0) return k(x, y);
  return cutoff_psi(r) * k(x, y);
}

// --- maximal function ------------------------------------------------------

/// Exact discrete Hardy-Littlewood maximal function: at each cell, the largest
/// mean of |f| over every grid-aligned interval containing that cell.
///
/// For a fixed left end a, a right-to-left sweep keeps the best mean over
/// intervals [a, b'] with b' >= b; that value is a candidate for cell b. The
/// whole sweep is O(m^2).
inline GridFunction maximal_fn(const GridFunction& f) {
  const std::size_t m = f.size();
  std::vector<double> prefix(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] + std::abs(f[i]);
  GridFunction out(f.grid);
  for (std::size_t a = 0; a < m; ++a) {
    double best = 0.0;
    for (std::size_t b = m; b-- > a;) {
      const double mean = (prefix[b + 1] - prefix[a]) / static_cast<double>(b + 1 - a);
      best = std::max(best, mean);
      out[b] = std::max(out[b], best);
    }
  }
  // The one-cell interval: never below |f| despite prefix-sum rounding.
  for (std::size_t i = 0; i < m; ++i) out[i] = std::max(out[i], std::abs(f[i]));
  return out;
}

// --- truncated operators ---------------------------------------------------

/// (T^eta f)(x) = sum_j K_eta(x, x_j) f_j h at an arbitrary point x.
template <PairKernel Kernel>
double truncated_sum_at(const GridFunction& f, const TruncationSpec& t, const Kernel& k, double x) {
  const Grid& g = f.grid;
  double s = 0.0;
  for (std::size_t j = 0; j < g.cells; ++j) {
    if (f[j] == 0.0) continue;
    s += truncated_kernel(k, t, x, g.center(j)) * f[j];
  }
  return s * g.cell_width;
}

template <PairKernel Kernel>
GridFunction apply_truncated(const GridFunction& f, const TruncationSpec& t, const Kernel& k) {
  check_truncation(f.grid, t);
  GridFunction out(f.grid);
  parallel_for(f.size(), [&](std::size_t i) { out[i] = truncated_sum_at(f, t, k, f.grid.center(i)); });
  return out;
}

/// Reference radius list 2^j h, j = 1..log2(m).
inline std::vector<double> default_eta_grid(const Grid& g) {
  std::vector<double> etas;
  for (std::size_t c = 2; c <= g.cells; c *= 2) etas.push_back(static_cast<double>(c) * g.cell_width);
  return etas;
}

/// T# f(x_i) = max over the radius list of |sum_{|x_i - x_j| > eta} K f_j h|
/// with a sharp cutoff. Partial sums are accumulated from the far cells
/// inward, so every radius costs nothing extra.
template <PairKernel Kernel>
GridFunction maximal_truncation(const GridFunction& f, std::span<const double> etas, const Kernel& k) {
  require(!etas.empty(), "maximal truncation needs at least one radius");
  const Grid& g = f.grid;
  for (double eta : etas) check_truncation(g, {eta});
  std::vector<double> desc(etas.begin(), etas.end());
  std::sort(desc.begin(), desc.end(), std::greater<>{});

  GridFunction out(g);
  const long m = static_cast<long>(g.cells);
  parallel_for(g.cells, [&](std::size_t ii) {
    const long i = static_cast<long>(ii);
    const double x = g.center(ii);
    double acc = 0.0, best = 0.0;
    std::size_t e = 0;
    for (long d = m - 1; d >= 1; --d) {
      // Radii with d*h <= eta exclude distance d and everything closer.
      while (e < desc.size() && !(static_cast<double>(d) * g.cell_width > desc[e])) {
        best = std::max(best, std::abs(acc));
        ++e;
      }
      if (e == desc.size()) break;
      for (long j : {i - d, i + d}) {
        if (j < 0 || j >= m || f[static_cast<std::size_t>(j)] == 0.0) continue;
        acc += k(x, g.center(static_cast<std::size_t>(j))) * f[static_cast<std::size_t>(j)] * g.cell_width;
      }
    }
    for (; e < desc.size(); ++e) best = std::max(best, std::abs(acc));
    out[ii] = best;
  });
  return out;
}

template <PairKernel Kernel>
GridFunction maximal_truncation(const GridFunction& f, const Kernel& k) {
  const auto etas = default_eta_grid(f.grid);
  return maximal_truncation(f, etas, k);
}

// --- commutators -----------------------------------------------------------

/// [b, T^eta] f evaluated at the translated centers x_i + shift_cells * h:
/// sum_j (b(x_i + s) - b_j) K_eta(x_i + s, x_j) f_j h. Outside the grid b takes
/// its edge value (zero for compactly supported b); the kernel is evaluated at
/// the true translated point.
template <PairKernel Kernel>
GridFunction commutator_at_shift(const GridFunction& b, const GridFunction& f, const TruncationSpec& t,
                                 const Kernel& k, long shift_cells) {
  check_same_grid(b, f);
  check_truncation(f.grid, t);
  const Grid& g = f.grid;
  const GridFunction b_shift = shift_clamped(b, shift_cells);
  const double offset = static_cast<double>(shift_cells) * g.cell_width;
  GridFunction out(g);
  parallel_for(g.cells, [&](std::size_t i) {
    const double x = g.center(i) + offset;
    const double bx = b_shift[i];
    double s = 0.0;
    for (std::size_t j = 0; j < g.cells; ++j) {
      if (f[j] == 0.0 || bx == b[j]) continue;
      s += (bx - b[j]) * truncated_kernel(k, t, x, g.center(j)) * f[j];
    }
    out[i] = s * g.cell_width;
  });
  return out;
}

/// ([b, T^eta] f)(x_i) = sum_j (b_i - b_j) K_eta(x_i, x_j) f_j h.
template <PairKernel Kernel>
GridFunction commutator(const GridFunction& b, const GridFunction& f, const TruncationSpec& t, const Kernel& k) {
  return commutator_at_shift(b, f, t, k, 0);
}

// --- measured kernel constants -----------------------------------------------

struct KernelConstants {
  double size = 0.0;       ///< sup |K(x,y)| |x-y|
  double smoothness = 0.0; ///< sup |dK/dx| |x-y|^2, by central differences
};

/// Measures the size and smoothness constants of K_eta (or of K when eta = 0)
/// over cell-center pairs. Rows are subsampled with the given stride; the two
/// end rows are always included so translation-invariant kernels see every
/// separation.
template <PairKernel Kernel>
KernelConstants measure_kernel_constants(const Kernel& k, const Grid& g, double eta = 0.0, std::size_t stride = 1) {
  KernelConstants c;
  const double fd = 1e-4 * g.cell_width;
  auto eval = [&](double x, double y) { return eta > 0.0 ? truncated_kernel(k, TruncationSpec{eta}, x, y) : k(x, y); };
  auto row = [&](std::size_t i) {
    const double x = g.center(i);
    for (std::size_t j = 0; j < g.cells; ++j) {
      if (j == i) continue;
      const double y = g.center(j);
      const double d = std::abs(x - y);
      if (d <= 2.0 * fd) continue;
      c.size = std::max(c.size, std::abs(eval(x, y)) * d);
      const double deriv = (eval(x + fd, y) - eval(x - fd, y)) / (2.0 * fd);
      c.smoothness = std::max(c.smoothness, std::abs(deriv) * d * d);
    }
  };
  for (std::size_t i = 0; i < g.cells; i += std::max<std::size_t>(stride, 1)) row(i);
  row(g.cells - 1);
  return c;
}

/// sup over cell pairs with |x - y| >= 2|s| of |K_eta(x+s, y) - K_eta(x, y)| |x-y|^2 / |s|,
/// for every shift s = k h in the list.
template <PairKernel Kernel>
double measure_regularity_constant(const Kernel& k, const TruncationSpec& t, const Grid& g,
                                   std::span<const long> shift_cells, std::size_t stride = 1) {
  double c = 0.0;
  auto row = [&](std::size_t i) {
    const double x = g.center(i);
    for (long sc : shift_cells) {
      if (sc == 0) continue;
      const double s = static_cast<double>(sc) * g.cell_width;
      for (std::size_t j = 0; j < g.cells; ++j) {
        const double y = g.center(j);
        const double d = std::abs(x - y);
        if (d < 2.0 * std::abs(s)) continue;
        const double diff = truncated_kernel(k, t, x + s, y) - truncated_kernel(k, t, x, y);
        c = std::max(c, std::abs(diff) * d * d / std::abs(s));
      }
    }
  };
  for (std::size_t i = 0; i < g.cells; i += std::max<std::size_t>(stride, 1)) row(i);
  row(g.cells - 1);
  return c;
}

} // namespace bumplab
