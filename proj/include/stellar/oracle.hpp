#ifndef STELLAR_ORACLE_HPP
#define STELLAR_ORACLE_HPP

// Number-basis reference evolution and zero recovery, sharing nothing with
// the zero dynamics beyond the Hamiltonian coefficients.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stellar/contour.hpp"
#include "stellar/dynamics.hpp"
#include "stellar/errors.hpp"
#include "stellar/hermite.hpp"
#include "stellar/ladder.hpp"
#include "stellar/state.hpp"

namespace stellar {

struct TruncatedOperator {
  Eigen::Index dim = 0;
  MatrixXc entries;
  double hermitian_defect = 0.0;
};

/// Matrix of H in the first cutoff + 1 number states. Products are formed in a
/// slightly larger basis so that the retained block is exact.
inline TruncatedOperator hamiltonian_matrix(const QuadraticHamiltonian& H, std::size_t cutoff)
{
  if (cutoff < 4) throw Error(ErrorCode::InvalidParameter, "Hamiltonian matrix needs cutoff >= 4");
  H.validate();
  const auto keep = static_cast<Eigen::Index>(cutoff + 1);
  const Eigen::Index big = keep + 2;
  const MatrixXc x = position_operator(big);
  const MatrixXc p = momentum_operator(big);
  const MatrixXc full = H.A * (x * x) + H.B * (p * p) + 0.5 * H.C * (x * p + p * x) + H.D * x + H.E * p +
                        H.F * MatrixXc::Identity(big, big);
  TruncatedOperator op;
  op.dim = keep;
  op.entries = full.topLeftCorner(keep, keep);
  op.hermitian_defect = (op.entries - op.entries.adjoint()).cwiseAbs().maxCoeff();
  return op;
}

namespace detail {

inline double top_quarter_norm(const VectorXc& v)
{
  const Eigen::Index n = v.size();
  const Eigen::Index q = std::max<Eigen::Index>(1, n / 4);
  return v.tail(q).norm();
}

} // namespace detail

/// exp(-i t H) v by eigendecomposition of the symmetrized truncation.
inline FockVector evolve_fock(const FockVector& v, const QuadraticHamiltonian& H, double t, std::size_t cutoff)
{
  const VectorXc v0 = v.resized(cutoff).to_eigen();
  if (v.cutoff() > cutoff) {
    double dropped = 0.0;
    for (std::size_t n = cutoff + 1; n < v.size(); ++n) dropped += std::norm(v[n]);
    if (dropped > 1e-20) throw Error(ErrorCode::TruncationLeakage, "input has weight above the evolution cutoff");
  }
  if (detail::top_quarter_norm(v0) > 1e-10)
    throw Error(ErrorCode::TruncationLeakage, "input support reaches the top quarter of the basis");

  const TruncatedOperator op = hamiltonian_matrix(H, cutoff);
  const MatrixXc sym = 0.5 * (op.entries + op.entries.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(sym);
  const MatrixXc& V = es.eigenvectors();
  VectorXc phases(V.cols());
  for (Eigen::Index k = 0; k < V.cols(); ++k) phases(k) = std::exp(cplx(0.0, -t * es.eigenvalues()(k)));
  const VectorXc out = V * phases.cwiseProduct(V.adjoint() * v0);

  const double leak = detail::top_quarter_norm(out);
  if (leak > 1e-8)
    throw Error(ErrorCode::TruncationLeakage, "top-quarter norm " + std::to_string(leak) + " after evolution");
  return FockVector::from_eigen(out);
}

struct ZeroSearchOptions {
  double min_cell = 1e-3;
  double jitter = 1e-4;
  int max_retries = 5;
  int samples_per_edge = 16;
  int newton_iterations = 50;
  double trim_ratio = 1e-300; // amplitudes below this fraction of the peak are dropped from the top
};

namespace detail {

struct ZeroSearch {
  const EntireFunction& f;
  const ZeroSearchOptions& opt;
  std::vector<cplx> found;

  int count(const Box& b) const { return count_zeros_box(f, b, opt.samples_per_edge); }

  cplx polish(cplx z0, const Box& cell) const
  {
    cplx z = z0;
    for (int it = 0; it < opt.newton_iterations; ++it) {
      const double h = 1e-6 * (1.0 + std::abs(z));
      const cplx fz = f(z);
      const cplx df = (f(z + h) - f(z - h)) / (2.0 * h);
      if (df == cplx(0.0, 0.0)) break;
      const cplx step = fz / df;
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return z0;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
    }
    // Newton wandering off to a neighbouring zero means the start was poor.
    const double reach = 4.0 * std::max(cell.width(), cell.height());
    return std::abs(z - z0) <= reach ? z : z0;
  }

  // Children of `b` split at its (jittered) midpoint; the children tile b exactly.
  std::array<Box, 4> split(const Box& b, double jx, double jy) const
  {
    const double xm = 0.5 * (b.x_min + b.x_max) + jx;
    const double ym = 0.5 * (b.y_min + b.y_max) + jy;
    return {Box{b.x_min, xm, b.y_min, ym}, Box{xm, b.x_max, b.y_min, ym}, Box{b.x_min, xm, ym, b.y_max},
            Box{xm, b.x_max, ym, b.y_max}};
  }

  void descend(const Box& b, int n)
  {
    if (n == 0) return;
    if (std::max(b.width(), b.height()) <= opt.min_cell) {
      const cplx z = polish(cplx(0.5 * (b.x_min + b.x_max), 0.5 * (b.y_min + b.y_max)), b);
      for (int m = 0; m < n; ++m) found.push_back(z);
      return;
    }
    for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
      // Deterministic jitter pattern, scaled to the cell.
      const double scale = std::min(opt.jitter, 0.1 * std::min(b.width(), b.height()));
      const double jx = attempt == 0 ? 0.0 : scale * ((attempt % 2) ? 1.0 : -1.0) * (1.0 + 0.37 * attempt);
      const double jy = attempt == 0 ? 0.0 : scale * ((attempt % 3) ? -1.0 : 1.0) * (1.0 + 0.21 * attempt);
      const std::array<Box, 4> kids = split(b, jx, jy);
      std::array<int, 4> counts{};
      bool ok = true;
      int total = 0;
      try {
        for (int i = 0; i < 4; ++i) {
          counts[static_cast<std::size_t>(i)] = count(kids[static_cast<std::size_t>(i)]);
          total += counts[static_cast<std::size_t>(i)];
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroOnContour) throw;
        ok = false;
      }
      if (ok && total == n) {
        for (int i = 0; i < 4; ++i) descend(kids[static_cast<std::size_t>(i)], counts[static_cast<std::size_t>(i)]);
        return;
      }
    }
    throw Error(ErrorCode::ZeroOnContour, "subdivision failed after jitter retries");
  }
};

} // namespace detail

/// Zeros of any entire function inside `box` with the expected total count.
inline std::vector<cplx> find_zeros(const EntireFunction& f, const Box& box, int expected,
                                    const ZeroSearchOptions& opt = {})
{
  Box outer = box;
  int total = -1;
  for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
    try {
      total = count_zeros_box(f, outer, opt.samples_per_edge * 4);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroOnContour || attempt == opt.max_retries) throw;
      const double j = opt.jitter * (attempt + 1);
      outer = Box{box.x_min - j, box.x_max + j, box.y_min - j, box.y_max + j};
    }
  }
  if (total != expected)
    throw Error(ErrorCode::CountMismatch,
                "box holds " + std::to_string(total) + " zeros, expected " + std::to_string(expected));
  detail::ZeroSearch search{f, opt, {}};
  search.descend(outer, total);
  return search.found;
}

/// Zeros of the Hermite-series wavefunction of v within |Re z|, |Im z| <= halfwidth.
inline std::vector<cplx> zeros_from_fock(const FockVector& v, int expected_rank, double box_halfwidth,
                                         const ZeroSearchOptions& opt = {})
{
  // Trailing amplitudes below trim_ratio of the peak only feed noise into the recurrence.
  std::size_t last = 0;
  double peak = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) peak = std::max(peak, std::abs(v[n]));
  for (std::size_t n = 0; n < v.size(); ++n)
    if (std::abs(v[n]) > opt.trim_ratio * peak) last = n;
  const FockVector trimmed = v.resized(last);
  const EntireFunction f = [&](cplx z) { return eval_entire_detailed(trimmed, z).value; };
  return find_zeros(f, Box::centered(box_halfwidth), expected_rank, opt);
}

} // namespace stellar

#endif // STELLAR_ORACLE_HPP
