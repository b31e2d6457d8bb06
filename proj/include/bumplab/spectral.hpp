#pragma once

// p = 2 spectral probe: [b, T^eta] : L^2(v) -> L^2(u) as an m x m matrix on
// unweighted coefficients, its singular values, and tail-energy ratios.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "bumplab/error.hpp"
#include "bumplab/grid.hpp"
#include "bumplab/operators.hpp"
#include "bumplab/orlicz.hpp"

namespace bumplab {

/// A_ij = u_i^{1/2} (b_i - b_j) K_eta(x_i, x_j) v_j^{-1/2} h, so that
/// A (v^{1/2} f) = u^{1/2} [b,T^eta] f cellwise. Both L^2 norms carry the same
/// factor sqrt(h), so A has the singular values of the weighted operator.
template <PairKernel Kernel>
Eigen::MatrixXd operator_matrix(const GridFunction& b, const TruncationSpec& t, const Kernel& k,
                                const GridFunction& u, const GridFunction& v) {
  check_same_grid(b, u);
  check_same_grid(b, v);
  check_truncation(b.grid, t);
  for (double x : v.values) require(x > 0.0, "weight v must be positive on every cell");
  for (double x : u.values) require(x >= 0.0, "weight u must be nonnegative");
  const Grid& g = b.grid;
  const auto m = static_cast<Eigen::Index>(g.cells);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    if (u[ii] == 0.0) continue;
    const double row = std::sqrt(u[ii]) * g.cell_width;
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      if (b[ii] == b[jj]) continue;
      a(i, j) = row * (b[ii] - b[jj]) * truncated_kernel(k, t, g.center(ii), g.center(jj)) / std::sqrt(v[jj]);
    }
  }
  return a;
}

inline constexpr double kSvdResidualTol = 1e-8;

/// All singular values, nonincreasing. Throws NumericalError when the
/// factorization residual ||A - U S V^T||_F exceeds 1e-8 sigma_1.
inline std::vector<double> singular_values(const Eigen::MatrixXd& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a.data()[i])) throw ValidationError("matrix has non-finite entries");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("singular value decomposition did not converge");
  const Eigen::VectorXd s = svd.singularValues();
  const double sigma1 = s.size() ? s(0) : 0.0;
  const double residual = (a - svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose()).norm();
  if (residual > kSvdResidualTol * sigma1 && residual > 0.0) {
    throw NumericalError("singular value decomposition residual too large");
  }
  std::vector<double> out(s.data(), s.data() + s.size());
  for (double& x : out) x = std::max(x, 0.0);
  std::sort(out.begin(), out.end(), std::greater<>{});
  return out;
}

struct TailRatio {
  std::size_t K = 0;
  double sigma_ratio = 0.0; ///< sigma_K / sigma_1 (1-based sigma_K)
  double energy_tail = 0.0; ///< sum_{k>K} sigma_k^2 / sum_k sigma_k^2
};

struct SpectralReport {
  std::size_t m = 0;
  std::vector<double> singular_values;
  std::vector<TailRatio> tail_ratios;
};

inline SpectralReport spectral_report(std::vector<double> sigma, std::span<const std::size_t> K_list) {
  SpectralReport r;
  r.m = sigma.size();
  r.singular_values = std::move(sigma);
  const auto& s = r.singular_values;
  double total = 0.0;
  for (double x : s) total += x * x;
  for (std::size_t K : K_list) {
    require(K >= 1 && K <= s.size(), "tail index K must lie in [1, m]");
    TailRatio tr{K, 0.0, 0.0};
    if (s.front() > 0.0) tr.sigma_ratio = s[K - 1] / s.front();
    if (total > 0.0) {
      double tail = 0.0;
      for (std::size_t k = K; k < s.size(); ++k) tail += s[k] * s[k];
      tr.energy_tail = tail / total;
    }
    r.tail_ratios.push_back(tr);
  }
  return r;
}

struct DecayComparison {
  SpectralReport cmo;
  SpectralReport bmo;
  double bmo_rescale = 1.0;         ///< factor applied to b_bmo to match BMO norms
  std::vector<bool> cmo_tail_smaller; ///< per K: cmo energy tail < bmo energy tail
};

/// Compares singular-value decay of [b_cmo, T^eta] and [b_bmo, T^eta] from
/// L^2(v) to L^2(u). b_bmo is rescaled to the BMO norm of b_cmo over the
/// given cube family first.
template <PairKernel Kernel>
DecayComparison decay_compare(const GridFunction& b_cmo, const GridFunction& b_bmo, const TruncationSpec& t,
                              const Kernel& k, const GridFunction& u, const GridFunction& v,
                              std::span<const std::size_t> K_list, const CubeFamily& family) {
  DecayComparison c;
  const double n_cmo = bmo_norm(b_cmo, family);
  const double n_bmo = bmo_norm(b_bmo, family);
  if (n_bmo > 0.0 && n_cmo > 0.0) c.bmo_rescale = n_cmo / n_bmo;
  const GridFunction scaled = c.bmo_rescale == 1.0 ? b_bmo : c.bmo_rescale * b_bmo;
  c.cmo = spectral_report(singular_values(operator_matrix(b_cmo, t, k, u, v)), K_list);
  c.bmo = b_cmo == scaled ? c.cmo : spectral_report(singular_values(operator_matrix(scaled, t, k, u, v)), K_list);
  for (std::size_t n = 0; n < K_list.size(); ++n) {
    c.cmo_tail_smaller.push_back(c.cmo.tail_ratios[n].energy_tail < c.bmo.tail_ratios[n].energy_tail);
  }
  return c;
}

} // namespace bumplab
