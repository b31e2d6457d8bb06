#pragma once

// Uniform 1-D discretization of [-L, L]: grids, grid-aligned cubes (closed
// intervals), piecewise-constant functions, and the builders used for symbols,
// weights and test functions.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "bumplab/error.hpp"

namespace bumplab {

struct Grid {
  double half_width = 1.0;
  std::size_t cells = 4;
  double cell_width = 0.5;

  std::size_t size() const { return cells; }
  double left() const { return -half_width; }
  double center(std::size_t i) const {
    return -half_width + (static_cast<double>(i) + 0.5) * cell_width;
  }

  friend bool operator==(const Grid&, const Grid&) = default;
};

inline Grid make_grid(double half_width, std::size_t cells) {
  require(std::isfinite(half_width) && half_width > 0.0, "grid half-width must be positive");
  require(cells >= 4 && std::has_single_bit(cells),
          "grid cell count must be a power of two >= 4, got " + std::to_string(cells));
  return Grid{half_width, cells, 2.0 * half_width / static_cast<double>(cells)};
}

/// Closed interval covering cells [first, first + length).
struct Cube {
  std::size_t first = 0;
  std::size_t length = 1;

  std::size_t end() const { return first + length; }
  double left(const Grid& g) const { return g.left() + static_cast<double>(first) * g.cell_width; }
  double right(const Grid& g) const { return left(g) + static_cast<double>(length) * g.cell_width; }
  bool contains_cell(std::size_t i) const { return i >= first && i < end(); }

  friend bool operator==(const Cube&, const Cube&) = default;
};

inline Cube whole_domain(const Grid& g) { return Cube{0, g.cells}; }

inline void check_cube(const Grid& g, const Cube& q) {
  require(q.length >= 1 && q.end() <= g.cells,
          "cube [" + std::to_string(q.first) + ", +" + std::to_string(q.length) + ") lies outside the grid");
}

/// A finite cube family standing in for "all cubes"; the name travels with
/// every constant computed over it.
struct CubeFamily {
  std::string name;
  std::vector<Cube> cubes;
};

/// Every dyadic cube with min_cells <= length <= max_cells (both powers of two).
inline std::vector<Cube> dyadic_cubes(const Grid& g, std::size_t min_cells, std::size_t max_cells) {
  require(std::has_single_bit(min_cells) && std::has_single_bit(max_cells),
          "dyadic cube lengths must be powers of two");
  std::vector<Cube> out;
  if (min_cells > max_cells) return out;
  for (std::size_t len = min_cells; len <= std::min(max_cells, g.cells); len *= 2) {
    for (std::size_t first = 0; first + len <= g.cells; first += len) out.push_back({first, len});
  }
  return out;
}

inline CubeFamily dyadic_family(const Grid& g, std::size_t min_cells = 1, std::size_t max_cells = 0) {
  if (max_cells == 0) max_cells = g.cells;
  return {"dyadic[" + std::to_string(min_cells) + "," + std::to_string(max_cells) + "]",
          dyadic_cubes(g, min_cells, max_cells)};
}

/// Dyadic cubes together with the family translated by half a side length.
inline CubeFamily shifted_dyadic_family(const Grid& g, std::size_t min_cells = 1, std::size_t max_cells = 0) {
  if (max_cells == 0) max_cells = g.cells;
  CubeFamily fam{"dyadic+half-shift[" + std::to_string(min_cells) + "," + std::to_string(max_cells) + "]",
                 dyadic_cubes(g, min_cells, max_cells)};
  for (std::size_t len = std::max<std::size_t>(min_cells, 2); len <= std::min(max_cells, g.cells); len *= 2) {
    for (std::size_t first = len / 2; first + len <= g.cells; first += len) fam.cubes.push_back({first, len});
  }
  return fam;
}

/// Values on each cell of a grid. Every builder and operator keeps them finite.
struct GridFunction {
  Grid grid;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(const Grid& g, double fill = 0.0) : grid(g), values(g.cells, fill) {}
  GridFunction(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    require(values.size() == grid.cells, "grid function length does not match the grid");
  }

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::span<const double> view() const { return values; }
  std::span<const double> view(const Cube& q) const { return std::span<const double>(values).subspan(q.first, q.length); }

  friend bool operator==(const GridFunction&, const GridFunction&) = default;
};

inline void check_same_grid(const GridFunction& a, const GridFunction& b) {
  require(a.grid == b.grid, "grid functions live on different grids");
}

inline void require_finite(const GridFunction& f, const std::string& what) {
  for (double x : f.values) {
    if (!std::isfinite(x)) throw ValidationError(what + " has a non-finite value");
  }
}

template <class Op>
GridFunction map(const GridFunction& f, Op op) {
  GridFunction out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = op(f[i]);
  return out;
}

template <class Op>
GridFunction zip(const GridFunction& f, const GridFunction& g, Op op) {
  check_same_grid(f, g);
  GridFunction out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = op(f[i], g[i]);
  return out;
}

inline GridFunction operator+(const GridFunction& f, const GridFunction& g) {
  return zip(f, g, std::plus<>{});
}
inline GridFunction operator-(const GridFunction& f, const GridFunction& g) {
  return zip(f, g, std::minus<>{});
}
inline GridFunction operator*(const GridFunction& f, const GridFunction& g) {
  return zip(f, g, std::multiplies<>{});
}
inline GridFunction operator*(double c, const GridFunction& f) {
  return map(f, [c](double x) { return c * x; });
}
inline GridFunction operator+(const GridFunction& f, double c) {
  return map(f, [c](double x) { return x + c; });
}

inline double max_abs(const GridFunction& f) {
  double m = 0.0;
  for (double x : f.values) m = std::max(m, std::abs(x));
  return m;
}

// Pairwise summation split at the midpoint, so a dyadic cube's sum is exactly
// the sum of its two halves' sums.
inline double pairwise_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() == 1) return v[0];
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double average(const GridFunction& f, const Cube& q) {
  check_cube(f.grid, q);
  return pairwise_sum(f.view(q)) / static_cast<double>(q.length);
}

/// (sum |f|^p w h)^(1/p) over the region (whole grid by default).
inline double lp_norm_weighted(const GridFunction& f, const GridFunction& w, double p,
                               std::optional<Cube> region = std::nullopt) {
  check_same_grid(f, w);
  require(p >= 1.0 && std::isfinite(p), "L^p exponent must satisfy p >= 1");
  const Cube q = region.value_or(whole_domain(f.grid));
  check_cube(f.grid, q);
  double sum = 0.0;
  for (std::size_t i = q.first; i < q.end(); ++i) {
    require(w[i] >= 0.0, "weights must be nonnegative");
    const double a = std::abs(f[i]);
    if (a == 0.0 || w[i] == 0.0) continue;
    sum += (p == 2.0 ? a * a : std::pow(a, p)) * w[i];
  }
  return std::pow(sum * f.grid.cell_width, 1.0 / p);
}

/// g_i = f_{i+k}; cells pulled in from outside the grid are zero.
inline GridFunction shift(const GridFunction& f, long k) {
  const long m = static_cast<long>(f.size());
  require(k > -m && k < m, "shift must be smaller than the grid");
  GridFunction out(f.grid);
  for (long i = 0; i < m; ++i) {
    const long src = i + k;
    if (src >= 0 && src < m) out[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(src)];
  }
  return out;
}

/// g_i = f_{i+k}; cells pulled in from outside take the nearest edge value.
inline GridFunction shift_clamped(const GridFunction& f, long k) {
  const long m = static_cast<long>(f.size());
  require(k > -m && k < m, "shift must be smaller than the grid");
  GridFunction out(f.grid);
  for (long i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(std::clamp(i + k, 0L, m - 1))];
  return out;
}

// ---------------------------------------------------------------------------
// Builders. Everything is sampled at cell centers.

namespace build {

template <class Fn>
GridFunction sample(const Grid& g, Fn fn) {
  GridFunction out(g);
  for (std::size_t i = 0; i < g.cells; ++i) out[i] = fn(g.center(i));
  require_finite(out, "sampled function");
  return out;
}

inline GridFunction constant(const Grid& g, double c) {
  require(std::isfinite(c), "constant must be finite");
  return GridFunction(g, c);
}

inline GridFunction coordinate(const Grid& g) {
  return sample(g, [](double x) { return x; });
}

/// 1 on cells whose center lies in [a, b].
inline GridFunction indicator(const Grid& g, double a, double b) {
  require(a <= b, "indicator needs a <= b");
  return sample(g, [a, b](double x) { return (x >= a && x <= b) ? 1.0 : 0.0; });
}

inline GridFunction gaussian(const Grid& g, double center, double sigma) {
  require(sigma > 0.0, "gaussian width must be positive");
  return sample(g, [=](double x) {
    const double z = (x - center) / sigma;
    return std::exp(-0.5 * z * z);
  });
}

inline double smooth_bump_value(double x, double center, double radius) {
  const double z = (x - center) / radius;
  const double s = 1.0 - z * z;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

/// exp(-1/(1 - ((x-c)/r)^2)) inside |x-c| < r, zero outside.
inline GridFunction smooth_bump(const Grid& g, double center, double radius) {
  require(radius > 0.0, "bump radius must be positive");
  return sample(g, [=](double x) { return smooth_bump_value(x, center, radius); });
}

/// max(log(1/(|x| + eps)), 0): bounded mean oscillation, not vanishing.
inline GridFunction log_spike(const Grid& g, double eps) {
  require(eps > 0.0, "log spike regularization must be positive");
  return sample(g, [eps](double x) { return std::max(std::log(1.0 / (std::abs(x) + eps)), 0.0); });
}

/// +1 on the left half of q, -1 on the right half, 0 elsewhere.
inline GridFunction haar(const Grid& g, const Cube& q) {
  check_cube(g, q);
  require(q.length >= 2 && q.length % 2 == 0, "haar cube needs an even number of cells");
  GridFunction out(g);
  for (std::size_t i = q.first; i < q.end(); ++i) out[i] = (i < q.first + q.length / 2) ? 1.0 : -1.0;
  return out;
}

/// |x|^alpha at cell centers; the origin is never a center.
inline GridFunction power_weight(const Grid& g, double alpha) {
  return sample(g, [alpha](double x) { return std::pow(std::abs(x), alpha); });
}

} // namespace build

// ---------------------------------------------------------------------------
// CSV: header "x,value", one row per cell center, 17 significant digits.

inline void write_csv(std::ostream& os, const GridFunction& f) {
  std::ostringstream buf;
  buf << std::setprecision(17) << "x,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) buf << f.grid.center(i) << ',' << f[i] << '\n';
  os << buf.str();
}

inline GridFunction read_csv(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)) && line == "x,value", "CSV header must be \"x,value\"");
  std::vector<double> xs, vs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    require(comma != std::string::npos, "malformed CSV row: " + line);
    xs.push_back(std::stod(line.substr(0, comma)));
    vs.push_back(std::stod(line.substr(comma + 1)));
  }
  require(xs.size() >= 4, "CSV holds too few cells for a grid");
  const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  const Grid g = make_grid(0.5 * h * static_cast<double>(xs.size()), xs.size());
  return GridFunction(g, std::move(vs));
}

} // namespace bumplab
