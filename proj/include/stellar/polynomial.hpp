#ifndef STELLAR_POLYNOMIAL_HPP
#define STELLAR_POLYNOMIAL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stellar/errors.hpp"
#include "stellar/ladder.hpp"

namespace stellar {

// Coefficient lists are stored lowest degree first: p(z) = sum_k c[k] z^k.

inline cplx horner(std::span<const cplx> c, cplx z)
{
  cplx acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

/// Value and first derivative in one pass.
inline std::pair<cplx, cplx> horner_with_derivative(std::span<const cplx> c, cplx z)
{
  cplx p = 0.0, dp = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    dp = dp * z + p;
    p = p * z + *it;
  }
  return {p, dp};
}

/// Monic-free expansion of lead * prod (z - root).
inline std::vector<cplx> poly_from_roots(std::span<const cplx> roots, cplx lead = 1.0)
{
  std::vector<cplx> c{lead};
  for (const cplx& r : roots) {
    std::vector<cplx> next(c.size() + 1, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = std::move(next);
  }
  return c;
}

struct RootCluster {
  cplx value;
  int multiplicity = 1;
};

struct RootReport {
  std::vector<cplx> roots; // with multiplicity
  std::vector<RootCluster> clusters;
  int iterations = 0;
  double max_residual_ratio = 0.0; // |P(root)| / residual bound, <= 1 when accepted
  bool converged = false;
};

namespace detail {

inline double coefficient_scale(std::span<const cplx> c)
{
  double s = 0.0;
  for (const cplx& x : c) s = std::max(s, std::abs(x));
  return s;
}

inline double residual_ratio(std::span<const cplx> c, cplx root)
{
  const double bound = 1e-10 * coefficient_scale(c) * std::pow(1.0 + std::abs(root), static_cast<double>(c.size() - 1));
  return std::abs(horner(c, root)) / bound;
}

} // namespace detail

/// Merge roots closer than `tol` into clusters (mean position, summed multiplicity).
inline std::vector<RootCluster> cluster_roots(std::span<const cplx> roots, double tol = 1e-6)
{
  std::vector<int> group(roots.size(), -1);
  std::vector<RootCluster> out;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (group[i] >= 0) continue;
    group[i] = static_cast<int>(out.size());
    cplx sum = roots[i];
    int count = 1;
    // Transitive closure so chains of near roots end up together.
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < roots.size(); ++j) {
        if (group[j] < 0 && std::abs(roots[j] - roots[cur]) < tol) {
          group[j] = group[i];
          sum += roots[j];
          ++count;
          stack.push_back(j);
        }
      }
    }
    out.push_back({sum / static_cast<double>(count), count});
  }
  return out;
}

/// Aberth-Ehrlich simultaneous iteration. Never throws on non-convergence;
/// inspect `converged` and `max_residual_ratio`.
inline RootReport aberth_roots(std::span<const cplx> coeffs, int max_iter = 200)
{
  std::vector<cplx> c(coeffs.begin(), coeffs.end());
  while (c.size() > 1 && c.back() == cplx(0.0, 0.0)) c.pop_back();
  if (c.empty() || c.back() == cplx(0.0, 0.0))
    throw Error(ErrorCode::InvalidParameter, "polynomial has a zero leading coefficient");

  RootReport rep;
  const std::size_t deg = c.size() - 1;
  if (deg == 0) {
    rep.converged = true;
    return rep;
  }
  if (deg == 1) {
    rep.roots = {-c[0] / c[1]};
    rep.clusters = {{rep.roots[0], 1}};
    rep.max_residual_ratio = detail::residual_ratio(c, rep.roots[0]);
    rep.converged = true;
    return rep;
  }

  // Initial guesses on a circle around the centroid, radius from the geometric-mean bound.
  const cplx center = -c[deg - 1] / (static_cast<double>(deg) * c[deg]);
  const std::vector<cplx> shifted = [&] {
    // Taylor shift to the centroid to pick a sensible radius.
    std::vector<cplx> s(c);
    for (std::size_t i = 0; i < deg; ++i)
      for (std::size_t k = deg - 1; k + 1 > i; --k) s[k] += center * s[k + 1];
    return s;
  }();
  double radius = 0.0;
  for (std::size_t k = 0; k < deg; ++k) {
    const double ratio = std::abs(shifted[k] / shifted[deg]);
    if (ratio > 0.0) radius = std::max(radius, std::pow(ratio, 1.0 / static_cast<double>(deg - k)));
  }
  if (!(radius > 0.0)) radius = 1.0;

  std::vector<cplx> z(deg);
  for (std::size_t k = 0; k < deg; ++k) {
    const double angle = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.25) / static_cast<double>(deg) + 0.4;
    z[k] = center + std::polar(radius, angle);
  }

  std::vector<bool> done(deg, false);
  for (rep.iterations = 0; rep.iterations < max_iter; ++rep.iterations) {
    bool all_done = true;
    for (std::size_t k = 0; k < deg; ++k) {
      if (done[k]) continue;
      const auto [p, dp] = horner_with_derivative(c, z[k]);
      if (p == cplx(0.0, 0.0)) {
        done[k] = true;
        continue;
      }
      const cplx ratio = p / dp;
      cplx sum = 0.0;
      for (std::size_t j = 0; j < deg; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      const cplx step = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
        all_done = false;
        z[k] += cplx(1e-8, 1e-8) * (1.0 + std::abs(z[k]));
        continue;
      }
      z[k] -= step;
      if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(z[k])))
        done[k] = true;
      else
        all_done = false;
    }
    if (all_done) break;
  }

  rep.clusters = cluster_roots(z);
  rep.roots.clear();
  for (const RootCluster& cl : rep.clusters)
    for (int m = 0; m < cl.multiplicity; ++m) rep.roots.push_back(cl.value);
  rep.max_residual_ratio = 0.0;
  for (const cplx& r : rep.roots) rep.max_residual_ratio = std::max(rep.max_residual_ratio, detail::residual_ratio(c, r));
  rep.converged = rep.max_residual_ratio <= 1.0;
  return rep;
}

/// All roots with multiplicity; throws NoConvergence if the residual bound is missed.
inline std::vector<cplx> roots_polynomial(std::span<const cplx> coeffs)
{
  RootReport rep = aberth_roots(coeffs);
  if (!rep.converged)
    throw Error(ErrorCode::NoConvergence,
                "root residual exceeds bound by factor " + std::to_string(rep.max_residual_ratio) + " after " +
                    std::to_string(rep.iterations) + " iterations");
  return rep.roots;
}

/// Characteristic polynomial det(zI - M) via Faddeev-LeVerrier, lowest degree first.
inline std::vector<cplx> characteristic_polynomial(const MatrixXc& m)
{
  const Eigen::Index n = m.rows();
  std::vector<cplx> c(static_cast<std::size_t>(n) + 1, cplx(0.0, 0.0));
  c[static_cast<std::size_t>(n)] = 1.0;
  MatrixXc mk = MatrixXc::Zero(n, n);
  const MatrixXc id = MatrixXc::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    mk = m * mk + c[static_cast<std::size_t>(n - k + 1)] * id;
    const MatrixXc amk = m * mk;
    c[static_cast<std::size_t>(n - k)] = -amk.trace() / static_cast<double>(k);
  }
  return c;
}

/// Eigenvalues of a small dense matrix through its characteristic polynomial.
inline std::vector<cplx> eigenvalues_small(const MatrixXc& m)
{
  if (m.rows() == 0) return {};
  if (m.rows() > 20) throw Error(ErrorCode::InvalidParameter, "characteristic-polynomial path limited to r <= 20");
  if (m.rows() == 1) return {m(0, 0)};
  RootReport rep = aberth_roots(characteristic_polynomial(m));
  return rep.roots;
}

} // namespace stellar

#endif // STELLAR_POLYNOMIAL_HPP
