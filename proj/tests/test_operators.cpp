#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bumplab/compactness.hpp"
#include "bumplab/operators.hpp"
#include "bumplab/random.hpp"

using namespace bumplab;

namespace {

GridFunction random_function(const Grid& g, std::uint64_t seed) {
  StreamRng rng(seed, 11);
  GridFunction f(g);
  for (double& x : f.values) x = rng.uniform(-1.0, 1.0);
  return f;
}

std::size_t nearest_cell(const Grid& g, double x) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < g.cells; ++i) {
    if (std::abs(g.center(i) - x) < std::abs(g.center(best) - x)) best = i;
  }
  return best;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) { return max_abs(a - b); }

} // namespace

TEST(Cutoff, Examples) {
  EXPECT_EQ(cutoff_psi(0.0), 0.0);
  EXPECT_EQ(cutoff_psi(1.0), 0.0);
  EXPECT_EQ(cutoff_psi(2.0), 1.0);
  EXPECT_EQ(cutoff_psi(7.0), 1.0);
  EXPECT_DOUBLE_EQ(cutoff_psi(1.5), 0.5);
  const double fd = 1e-7;
  EXPECT_LE(std::abs(cutoff_psi(1.0 + fd) - cutoff_psi(1.0)) / fd, 1e-6);
  EXPECT_LE(std::abs(cutoff_psi(2.0) - cutoff_psi(2.0 - fd)) / fd, 1e-6);
  double prev = 0.0;
  for (double r = 0.0; r <= 3.0; r += 1e-3) {
    const double v = cutoff_psi(r);
    ASSERT_GE(v, prev);
    ASSERT_LE(v, 1.0);
    prev = v;
  }
  for (double r : {1.1, 1.37, 1.5, 1.9}) {
    const double num = (cutoff_psi(r + 1e-6) - cutoff_psi(r - 1e-6)) / 2e-6;
    EXPECT_NEAR(cutoff_psi_derivative(r), num, 1e-6);
  }
}

TEST(TruncatedKernel, VanishesInsideAndIsExactOutsideTheRing) {
  const HilbertKernel k;
  const TruncationSpec t{0.1};
  EXPECT_EQ(truncated_kernel(k, t, 0.0, 0.1), 0.0);
  EXPECT_EQ(truncated_kernel(k, t, 0.3, 0.25), 0.0);
  const Grid g = make_grid(1.0, 256);
  for (std::size_t i = 0; i < g.cells; i += 7) {
    for (std::size_t j = 0; j < g.cells; ++j) {
      const double x = g.center(i), y = g.center(j);
      if (std::abs(x - y) > 2.0 * t.eta) ASSERT_EQ(truncated_kernel(k, t, x, y), k(x, y));
      if (std::abs(x - y) <= t.eta) ASSERT_EQ(truncated_kernel(k, t, x, y), 0.0);
    }
  }
}

TEST(KernelConstants, HilbertMeasured) {
  const Grid g = make_grid(1.0, 256);
  const HilbertKernel k;
  const KernelConstants c = measure_kernel_constants(k, g);
  EXPECT_NEAR(c.size, std::numbers::inv_pi, 1e-12);
  EXPECT_NEAR(c.smoothness, std::numbers::inv_pi, 1e-5);
  // the truncated kernel keeps the same bounds up to a fixed multiple
  const KernelConstants ct = measure_kernel_constants(k, g, 8.0 * g.cell_width);
  EXPECT_LE(ct.size, c.size * (1 + 1e-12));
  EXPECT_LE(ct.smoothness, 8.0 * c.smoothness);
  EXPECT_GE(ct.smoothness, c.smoothness * 0.5);
}

TEST(KernelConstants, RegularityTransfer) {
  const Grid g = make_grid(1.0, 512);
  const HilbertKernel k;
  const std::vector<long> shifts{1, -1, 2, 4};
  double prev = 0.0;
  for (double cells : {4.0, 8.0, 16.0}) {
    const double c = measure_regularity_constant(k, truncation_in_cells(g, cells), g, shifts, 3);
    EXPECT_GE(c, 0.5 * std::numbers::inv_pi);
    EXPECT_LE(c, 16.0 * std::numbers::inv_pi);
    if (prev > 0.0) EXPECT_LT(std::max(c, prev) / std::min(c, prev), 2.0);
    prev = c;
  }
}

TEST(MaximalFn, MatchesBruteForce) {
  const Grid g = make_grid(1.0, 32);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GridFunction f = random_function(g, seed);
    const GridFunction mf = maximal_fn(f);
    for (std::size_t i = 0; i < g.cells; ++i) {
      double best = 0.0;
      for (std::size_t a = 0; a <= i; ++a) {
        for (std::size_t b = i; b < g.cells; ++b) {
          double s = 0.0;
          for (std::size_t j = a; j <= b; ++j) s += std::abs(f[j]);
          best = std::max(best, s / static_cast<double>(b - a + 1));
        }
      }
      ASSERT_NEAR(mf[i], best, 1e-14);
      ASSERT_GE(mf[i], std::abs(f[i]));
    }
  }
}

TEST(MaximalFn, Examples) {
  const Grid g = make_grid(4.0, 512);
  for (double x : maximal_fn(build::constant(g, -2.5)).values) EXPECT_DOUBLE_EQ(x, 2.5);

  const GridFunction mf = maximal_fn(build::indicator(g, -1.0, 1.0));
  EXPECT_NEAR(mf[nearest_cell(g, 3.0)], 0.5, 2.0 * g.cell_width);
  double c_lower = 1e300;
  for (std::size_t i = 0; i < g.cells; ++i) c_lower = std::min(c_lower, mf[i] * (1.0 + std::abs(g.center(i))));
  EXPECT_GE(c_lower, 0.9);
}

TEST(MaximalFn, Sublinear) {
  const Grid g = make_grid(1.0, 128);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GridFunction f = random_function(g, seed), h = random_function(g, seed + 50);
    const GridFunction lhs = maximal_fn(f + h), rhs = maximal_fn(f) + maximal_fn(h);
    for (std::size_t i = 0; i < g.cells; ++i) ASSERT_LE(lhs[i], rhs[i] + 1e-14);
  }
}

TEST(ApplyTruncated, RejectsUnresolvedRadius) {
  const Grid g = make_grid(1.0, 64);
  const GridFunction f = build::constant(g, 1.0);
  EXPECT_THROW(apply_truncated(f, TruncationSpec{g.cell_width}, HilbertKernel{}), ValidationError);
  EXPECT_NO_THROW(apply_truncated(f, truncation_in_cells(g, 2.0), HilbertKernel{}));
}

TEST(ApplyTruncated, VanishesWhenSupportIsInsideRadius) {
  const Grid g = make_grid(1.0, 256);
  const TruncationSpec t = truncation_in_cells(g, 10.0);
  const std::size_t i = 100;
  GridFunction f(g);
  for (std::size_t j = i - 10; j <= i + 10; ++j) f[j] = 1.0 + static_cast<double>(j);
  EXPECT_EQ(apply_truncated(f, t, HilbertKernel{})[i], 0.0);
}

TEST(ApplyTruncated, HilbertOfIndicatorMatchesClosedForm) {
  const Grid g = make_grid(4.0, 4096);
  const TruncationSpec t = truncation_in_cells(g, 8.0);
  const GridFunction chi = build::indicator(g, 0.0, 1.0);
  const double oracle = std::numbers::inv_pi * std::log(2.0);
  EXPECT_NEAR(oracle, 0.22064, 1e-5);
  EXPECT_NEAR(truncated_sum_at(chi, t, HilbertKernel{}, 2.0), oracle, 0.01 * oracle);
  const GridFunction tf = apply_truncated(chi, t, HilbertKernel{});
  for (double x : {-2.0, 3.0}) {
    const std::size_t i = nearest_cell(g, x);
    const double xc = g.center(i);
    const double exact = std::numbers::inv_pi * std::log(std::abs(xc / (xc - 1.0)));
    EXPECT_NEAR(tf[i], exact, 0.01 * std::abs(exact));
  }
}

TEST(ApplyTruncated, OddOutputForEvenInput) {
  const Grid g = make_grid(2.0, 512);
  const GridFunction f = build::gaussian(g, 0.0, 0.4) + build::indicator(g, -0.5, 0.5);
  const GridFunction tf = apply_truncated(f, truncation_in_cells(g, 4.0), HilbertKernel{});
  for (std::size_t i = 0; i < g.cells; ++i) ASSERT_NEAR(tf[i], -tf[g.cells - 1 - i], 1e-10);
}

TEST(ApplyTruncated, Linear) {
  const Grid g = make_grid(1.0, 256);
  const TruncationSpec t = truncation_in_cells(g, 3.0);
  const GridFunction f = random_function(g, 1), h = random_function(g, 2);
  const GridFunction lhs = apply_truncated(2.5 * f + (-0.75) * h, t, HilbertKernel{});
  const GridFunction rhs = 2.5 * apply_truncated(f, t, HilbertKernel{}) + (-0.75) * apply_truncated(h, t, HilbertKernel{});
  EXPECT_LE(max_abs_diff(lhs, rhs), 1e-12 * max_abs(rhs));
}

TEST(MaximalTruncation, MatchesBruteForce) {
  const Grid g = make_grid(1.0, 64);
  const HilbertKernel k;
  const auto etas = default_eta_grid(g);
  ASSERT_EQ(etas.size(), 6u);
  const GridFunction f = random_function(g, 3);
  const GridFunction ts = maximal_truncation(f, k);
  for (std::size_t i = 0; i < g.cells; ++i) {
    double best = 0.0;
    for (double eta : etas) {
      double s = 0.0;
      for (std::size_t j = 0; j < g.cells; ++j) {
        const double d = std::abs(static_cast<double>(j) - static_cast<double>(i)) * g.cell_width;
        if (d > eta) s += k(g.center(i), g.center(j)) * f[j] * g.cell_width;
      }
      best = std::max(best, std::abs(s));
    }
    ASSERT_NEAR(ts[i], best, 1e-12 * std::max(best, 1.0));
  }
}

TEST(MaximalTruncation, ZeroAndHomogeneity) {
  const Grid g = make_grid(1.0, 128);
  for (double x : maximal_truncation(GridFunction(g), HilbertKernel{}).values) EXPECT_EQ(x, 0.0);
  const GridFunction f = random_function(g, 4);
  const GridFunction base = maximal_truncation(f, HilbertKernel{});
  for (double c : {-2.0, 0.5, 4.0}) {
    const GridFunction scaled = maximal_truncation(c * f, HilbertKernel{});
    for (std::size_t i = 0; i < g.cells; ++i) ASSERT_EQ(scaled[i], std::abs(c) * base[i]);
  }
  const std::vector<double> bad{0.5 * g.cell_width};
  EXPECT_THROW(maximal_truncation(f, bad, HilbertKernel{}), ValidationError);
}

TEST(MaximalTruncation, DominatesSmoothTruncation) {
  const Grid g = make_grid(2.0, 256);
  const HilbertKernel k;
  const UnitBallSample sample = sample_unit_ball(build::constant(g, 1.0), 2.0, 8, 70);
  std::vector<double> ratios;
  for (double cells = 4.0; cells * g.cell_width <= g.half_width / 4.0; cells *= 2.0) {
    double worst = 0.0;
    for (const GridFunction& f : sample.functions) {
      const GridFunction tf = apply_truncated(f, truncation_in_cells(g, cells), k);
      const GridFunction dom = maximal_fn(f) + maximal_truncation(f, k);
      for (std::size_t i = 0; i < g.cells; ++i) worst = std::max(worst, std::abs(tf[i]) / (dom[i] + 1e-300));
    }
    ratios.push_back(worst);
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  EXPECT_LT(*hi / *lo, 2.0);
  EXPECT_LT(*hi, 10.0);
}

TEST(Commutator, ConstantSymbolGivesZero) {
  const Grid g = make_grid(1.0, 128);
  const GridFunction c = commutator(build::constant(g, 3.0), random_function(g, 5), truncation_in_cells(g, 2.0),
                                    HilbertKernel{});
  for (double x : c.values) EXPECT_EQ(x, 0.0);
}

TEST(Commutator, LinearInSymbol) {
  const Grid g = make_grid(1.0, 128);
  const TruncationSpec t = truncation_in_cells(g, 4.0);
  const GridFunction f = random_function(g, 6), b1 = random_function(g, 7), b2 = random_function(g, 8);
  const GridFunction lhs = commutator(b1 + b2, f, t, HilbertKernel{});
  const GridFunction rhs = commutator(b1, f, t, HilbertKernel{}) + commutator(b2, f, t, HilbertKernel{});
  EXPECT_LE(max_abs_diff(lhs, rhs), 1e-13 * max_abs(rhs));
}

TEST(Commutator, MatchesProductRule) {
  const Grid g = make_grid(1.0, 256);
  const TruncationSpec t = truncation_in_cells(g, 5.0);
  const GridFunction f = random_function(g, 9), b = build::smooth_bump(g, 0.1, 0.4);
  const GridFunction direct = commutator(b, f, t, HilbertKernel{});
  const GridFunction product = b * apply_truncated(f, t, HilbertKernel{}) - apply_truncated(b * f, t, HilbertKernel{});
  EXPECT_LE(max_abs_diff(direct, product), 1e-12 * max_abs(direct));
}

TEST(Commutator, ShiftedEvaluationMatchesPointwiseSums) {
  const Grid g = make_grid(1.0, 64);
  const TruncationSpec t = truncation_in_cells(g, 4.0);
  const GridFunction f = random_function(g, 10), b = build::gaussian(g, 0.0, 0.3);
  for (long s : {-3L, 2L}) {
    const GridFunction out = commutator_at_shift(b, f, t, HilbertKernel{}, s);
    for (std::size_t i = 0; i < g.cells; ++i) {
      const long src = std::clamp(static_cast<long>(i) + s, 0L, 63L);
      const double bx = b[static_cast<std::size_t>(src)];
      const double x = g.center(i) + static_cast<double>(s) * g.cell_width;
      double sum = 0.0;
      for (std::size_t j = 0; j < g.cells; ++j) sum += (bx - b[j]) * truncated_kernel(HilbertKernel{}, t, x, g.center(j)) * f[j];
      ASSERT_NEAR(out[i], sum * g.cell_width, 1e-13);
    }
  }
}

TEST(Commutator, TruncationErrorScalesWithEta) {
  const Grid g = make_grid(2.0, 1024);
  const HilbertKernel k;
  const GridFunction b = build::smooth_bump(g, 0.0, 0.5);
  const GridFunction u = build::constant(g, 1.0);
  std::vector<double> ratios;
  for (double cells : {32.0, 16.0, 8.0}) {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const GridFunction f = random_function(g, 20 + seed);
      const GridFunction d = commutator(b, f, truncation_in_cells(g, cells), k) -
                             commutator(b, f, truncation_in_cells(g, cells / 2.0), k);
      worst = std::max(worst, lp_norm_weighted(d, u, 2.0) / (cells * g.cell_width));
    }
    ratios.push_back(worst);
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  EXPECT_LT(*hi / *lo, 4.0);
}
