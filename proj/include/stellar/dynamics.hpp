#ifndef STELLAR_DYNAMICS_HPP
#define STELLAR_DYNAMICS_HPP

// Motion of wavefunction zeros under quadratic Hamiltonians: direct
// integration of the first-order system and the Lax-matrix solution.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stellar/assignment.hpp"
#include "stellar/errors.hpp"
#include "stellar/ode.hpp"
#include "stellar/polynomial.hpp"
#include "stellar/wavefunction.hpp"

namespace stellar {

/// H = A x^2 + B p^2 + C (xp + px)/2 + D x + E p + F
struct QuadraticHamiltonian {
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0, E = 0.0, F = 0.0;

  double omega2() const noexcept { return 4.0 * A * B - C * C; }

  /// n + 1/2
  static QuadraticHamiltonian number_operator() { return {0.5, 0.5, 0.0, 0.0, 0.0, 0.0}; }

  QuadraticHamiltonian reversed() const { return {-A, -B, -C, -D, -E, -F}; }

  void validate() const
  {
    for (double c : {A, B, C, D, E, F})
      if (!std::isfinite(c)) throw Error(ErrorCode::InvalidParameter, "Hamiltonian coefficient is not finite");
  }
};

inline double min_pairwise_gap(std::span<const cplx> zeros)
{
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < zeros.size(); ++i)
    for (std::size_t j = i + 1; j < zeros.size(); ++j) gap = std::min(gap, std::abs(zeros[i] - zeros[j]));
  return gap;
}

struct OdeRhs {
  cplx dg2;
  cplx dg1;
  std::vector<cplx> dzeros;
};

inline constexpr double kCollisionGap = 1e-9;

/// Time derivatives of (g2, g1, zeros) for psi = e^{g2 z^2 + g1 z + g0} prod (z - zeros).
///
/// dg2 = 4iB g2^2 - 2C g2 - iA
/// dg1 = 4iB g2 g1 - C g1 - 2E g2 - iD
/// dl_k = l_k (C - 4iB g2) - 2iB g1 + E - 2iB sum_{m != k} 1/(l_k - l_m)
inline OdeRhs ode_rhs(cplx g2, cplx g1, std::span<const cplx> zeros, const QuadraticHamiltonian& H)
{
  const cplx I(0.0, 1.0);
  const double gap = min_pairwise_gap(zeros);
  if (gap <= kCollisionGap)
    throw Error(ErrorCode::ZeroCollision, "zeros closer than " + std::to_string(kCollisionGap));
  OdeRhs out;
  out.dg2 = 4.0 * I * H.B * g2 * g2 - 2.0 * H.C * g2 - I * H.A;
  out.dg1 = 4.0 * I * H.B * g2 * g1 - H.C * g1 - 2.0 * H.E * g2 - I * H.D;
  out.dzeros.resize(zeros.size());
  const cplx linear = H.C - 4.0 * I * H.B * g2;
  const cplx constant = -2.0 * I * H.B * g1 + H.E;
  for (std::size_t k = 0; k < zeros.size(); ++k) {
    cplx s = 0.0;
    for (std::size_t m = 0; m < zeros.size(); ++m)
      if (m != k) s += 1.0 / (zeros[k] - zeros[m]);
    out.dzeros[k] = zeros[k] * linear + constant - 2.0 * I * H.B * s;
  }
  return out;
}

/// Second-order form: l_k'' = (C^2 - 4AB) l_k + CE - 2BD + 8B^2 sum_{m != k} (l_k - l_m)^{-3}
inline std::vector<cplx> second_order_rhs(std::span<const cplx> zeros, const QuadraticHamiltonian& H)
{
  std::vector<cplx> out(zeros.size());
  for (std::size_t k = 0; k < zeros.size(); ++k) {
    cplx s = 0.0;
    for (std::size_t m = 0; m < zeros.size(); ++m)
      if (m != k) s += 1.0 / std::pow(zeros[k] - zeros[m], 3);
    out[k] = -H.omega2() * zeros[k] + H.C * H.E - 2.0 * H.B * H.D + 8.0 * H.B * H.B * s;
  }
  return out;
}

enum class Method { ODE, ClosedForm };

inline const char* to_string(Method m) { return m == Method::ODE ? "ode" : "closed"; }

struct ZeroTrajectory {
  std::vector<double> times;
  std::vector<std::vector<cplx>> paths; // paths[k][i] = zero k at times[i]
  std::vector<std::pair<cplx, cplx>> gauss_path;
  Method method = Method::ODE;
  WavefunctionForm initial;
  QuadraticHamiltonian hamiltonian;

  std::size_t rank() const noexcept { return paths.size(); }

  std::vector<cplx> zeros_at(std::size_t i) const
  {
    std::vector<cplx> z(paths.size());
    for (std::size_t k = 0; k < paths.size(); ++k) z[k] = paths[k][i];
    return z;
  }
};

namespace detail {

inline void check_grid(std::span<const double> t_grid)
{
  if (t_grid.empty()) throw Error(ErrorCode::InvalidParameter, "empty time grid");
  if (t_grid.front() < 0.0) throw Error(ErrorCode::InvalidParameter, "time grid must start at or after 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw Error(ErrorCode::InvalidParameter, "time grid must be increasing");
}

} // namespace detail

/// Riccati/linear evolution of (g2, g1) alone.
inline std::vector<std::pair<cplx, cplx>> integrate_gaussian(cplx g2, cplx g1, const QuadraticHamiltonian& H,
                                                             std::span<const double> t_grid,
                                                             const OdeOptions& opt = {})
{
  detail::check_grid(t_grid);
  const OdeFunction f = [&](double, const VectorXc& y) {
    const OdeRhs r = ode_rhs(y(0), y(1), {}, H);
    VectorXc d(2);
    d << r.dg2, r.dg1;
    return d;
  };
  VectorXc y(2);
  y << g2, g1;
  double t = 0.0, h = 0.0;
  std::vector<std::pair<cplx, cplx>> out;
  out.reserve(t_grid.size());
  for (double target : t_grid) {
    dopri45_advance(f, t, target, y, h, opt);
    t = target;
    out.emplace_back(y(0), y(1));
  }
  return out;
}

/// Adaptive Dormand-Prince integration of the full zero system.
inline ZeroTrajectory integrate(const WavefunctionForm& wf, const QuadraticHamiltonian& H,
                                std::span<const double> t_grid, const OdeOptions& opt = {})
{
  detail::check_grid(t_grid);
  H.validate();
  if (min_pairwise_gap(wf.zeros) <= 1e-6)
    throw Error(ErrorCode::DegenerateInitialZeros, "initial zeros closer than 1e-6");

  const std::size_t r = wf.zeros.size();
  const OdeFunction f = [&](double t, const VectorXc& y) {
    std::vector<cplx> zeros(y.data() + 2, y.data() + y.size());
    OdeRhs rhs;
    try {
      rhs = ode_rhs(y(0), y(1), zeros, H);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ZeroCollision) throw ZeroCollisionError(t, min_pairwise_gap(zeros));
      throw;
    }
    VectorXc d(y.size());
    d(0) = rhs.dg2;
    d(1) = rhs.dg1;
    for (std::size_t k = 0; k < r; ++k) d(static_cast<Eigen::Index>(k + 2)) = rhs.dzeros[k];
    return d;
  };

  VectorXc y(static_cast<Eigen::Index>(r + 2));
  y(0) = wf.g2;
  y(1) = wf.g1;
  for (std::size_t k = 0; k < r; ++k) y(static_cast<Eigen::Index>(k + 2)) = wf.zeros[k];

  ZeroTrajectory traj;
  traj.method = Method::ODE;
  traj.initial = wf;
  traj.hamiltonian = H;
  traj.times.assign(t_grid.begin(), t_grid.end());
  traj.paths.assign(r, {});
  double t = 0.0, h = 0.0;
  for (double target : t_grid) {
    dopri45_advance(f, t, target, y, h, opt);
    t = target;
    traj.gauss_path.emplace_back(y(0), y(1));
    for (std::size_t k = 0; k < r; ++k) traj.paths[k].push_back(y(static_cast<Eigen::Index>(k + 2)));
  }
  return traj;
}

/// Ingredients of the matrix solution, in scaled and shifted coordinates
/// mu = (l - shift)/scale with scale^4 = 4B^2.
struct LaxData {
  MatrixXc Lambda0;
  MatrixXc Lmat;
  cplx omega;
  cplx shift;
  cplx scale;
};

/// Which rotation factor multiplies the initial diagonal. Only `Corrected`
/// (e^{-i omega t}) reproduces the integrated motion; `Literal` is kept for comparison.
enum class RotationSign { Corrected, Literal };

inline LaxData lax_data(const WavefunctionForm& wf, const QuadraticHamiltonian& H)
{
  H.validate();
  if (H.B == 0.0) throw Error(ErrorCode::UnsupportedHamiltonian, "matrix solution needs B != 0");
  if (std::abs(H.omega2()) < 1e-12) throw Error(ErrorCode::UnsupportedHamiltonian, "matrix solution needs omega^2 != 0");
  if (min_pairwise_gap(wf.zeros) <= kCollisionGap)
    throw Error(ErrorCode::DegenerateInitialZeros, "initial zeros are not distinct");

  const auto r = static_cast<Eigen::Index>(wf.zeros.size());
  LaxData lx;
  lx.omega = std::sqrt(cplx(H.omega2(), 0.0));
  lx.shift = (H.C * H.E - 2.0 * H.B * H.D) / H.omega2();
  lx.scale = std::pow(cplx(4.0 * H.B * H.B, 0.0), 0.25);

  const OdeRhs rhs = ode_rhs(wf.g2, wf.g1, wf.zeros, H);
  std::vector<cplx> mu(static_cast<std::size_t>(r));
  for (Eigen::Index j = 0; j < r; ++j) mu[static_cast<std::size_t>(j)] = (wf.zeros[static_cast<std::size_t>(j)] - lx.shift) / lx.scale;

  const cplx I(0.0, 1.0);
  lx.Lambda0 = MatrixXc::Zero(r, r);
  lx.Lmat = MatrixXc::Zero(r, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    const auto sj = static_cast<std::size_t>(j);
    lx.Lambda0(j, j) = mu[sj];
    lx.Lmat(j, j) = rhs.dzeros[sj] / lx.scale + I * lx.omega * mu[sj];
    for (Eigen::Index k = 0; k < r; ++k)
      if (k != j) lx.Lmat(j, k) = I / (mu[sj] - mu[static_cast<std::size_t>(k)]);
  }
  return lx;
}

/// X(t) in scaled coordinates: Lambda0 e^{-i omega t} + L sin(omega t)/omega.
inline MatrixXc lax_matrix_at(const LaxData& lx, double t, RotationSign sign = RotationSign::Corrected)
{
  const cplx I(0.0, 1.0);
  const cplx rot = std::exp((sign == RotationSign::Corrected ? -1.0 : 1.0) * I * lx.omega * t);
  return lx.Lambda0 * rot + lx.Lmat * (std::sin(lx.omega * t) / lx.omega);
}

inline std::vector<cplx> closed_form(const LaxData& lx, double t, RotationSign sign = RotationSign::Corrected)
{
  std::vector<cplx> ev = eigenvalues_small(lax_matrix_at(lx, t, sign));
  for (cplx& z : ev) z = lx.scale * z + lx.shift;
  return ev;
}

/// Zeros at time t from the eigenvalues of the Lax-type matrix.
inline std::vector<cplx> closed_form(const WavefunctionForm& wf, const QuadraticHamiltonian& H, double t,
                                     RotationSign sign = RotationSign::Corrected)
{
  if (wf.zeros.empty()) return {};
  return closed_form(lax_data(wf, H), t, sign);
}

struct TrackingOptions {
  int max_depth = 30;
  double min_width = 1e-9;
  double gap_fraction = 0.5;   // step must stay below this fraction of the smallest gap
  double median_factor = 10.0; // outlier step against the median step (r >= 3)
};

namespace detail {

inline std::vector<cplx> reorder(std::span<const cplx> prev, std::span<const cplx> next)
{
  const std::vector<int> perm = match_points(prev, next);
  std::vector<cplx> out(prev.size());
  for (std::size_t k = 0; k < prev.size(); ++k) out[k] = next[static_cast<std::size_t>(perm[k])];
  return out;
}

inline bool step_acceptable(std::span<const cplx> prev, std::span<const cplx> next, const TrackingOptions& opt)
{
  const std::size_t r = prev.size();
  if (r < 2) return true;
  std::vector<double> d(r);
  for (std::size_t k = 0; k < r; ++k) d[k] = std::abs(next[k] - prev[k]);
  const double dmax = *std::max_element(d.begin(), d.end());
  const double gap = min_pairwise_gap(prev);
  if (dmax > opt.gap_fraction * gap) return false;
  if (r >= 3) {
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(r / 2), d.end());
    const double median = d[r / 2];
    if (dmax > opt.median_factor * median + 0.05 * gap) return false;
  }
  return true;
}

template <class Eval>
std::vector<cplx> track_step(const Eval& eval, std::span<const cplx> prev, double t0, double t1, int depth,
                             const TrackingOptions& opt)
{
  std::vector<cplx> next = reorder(prev, eval(t1));
  if (depth >= opt.max_depth || t1 - t0 <= opt.min_width || step_acceptable(prev, next, opt)) return next;
  const double mid = 0.5 * (t0 + t1);
  const std::vector<cplx> at_mid = track_step(eval, prev, t0, mid, depth + 1, opt);
  return track_step(eval, at_mid, mid, t1, depth + 1, opt);
}

} // namespace detail

/// Samples the matrix solution on t_grid and links eigenvalues into continuous paths.
inline ZeroTrajectory closed_form_trajectory(const WavefunctionForm& wf, const QuadraticHamiltonian& H,
                                             std::span<const double> t_grid, const TrackingOptions& opt = {},
                                             RotationSign sign = RotationSign::Corrected)
{
  detail::check_grid(t_grid);
  ZeroTrajectory traj;
  traj.method = Method::ClosedForm;
  traj.initial = wf;
  traj.hamiltonian = H;
  traj.times.assign(t_grid.begin(), t_grid.end());
  traj.gauss_path = integrate_gaussian(wf.g2, wf.g1, H, t_grid);
  const std::size_t r = wf.zeros.size();
  traj.paths.assign(r, {});
  if (r == 0) return traj;

  const LaxData lx = lax_data(wf, H);
  auto eval = [&](double t) { return closed_form(lx, t, sign); };
  std::vector<cplx> cur = wf.zeros;
  double t_prev = 0.0;
  for (double t : t_grid) {
    if (t > t_prev) cur = detail::track_step(eval, cur, t_prev, t, 0, opt);
    t_prev = t;
    for (std::size_t k = 0; k < r; ++k) traj.paths[k].push_back(cur[k]);
  }
  return traj;
}

/// Full form at time t: zeros from the matrix solution (or integration when it
/// is unavailable), (g2, g1) integrated, Re(g0) from normalization. The leading
/// coefficient and Im(g0) are carried over; use align_phase to fix the phase.
inline WavefunctionForm evolve_form(const WavefunctionForm& wf, const QuadraticHamiltonian& H, double t)
{
  if (t < 0.0) throw Error(ErrorCode::InvalidParameter, "evolve_form needs t >= 0");
  WavefunctionForm out = wf;
  const double grid[1] = {t};
  if (t == 0.0) return normalized(out);
  const auto gauss = integrate_gaussian(wf.g2, wf.g1, H, grid);
  out.g2 = gauss.back().first;
  out.g1 = gauss.back().second;
  if (!wf.zeros.empty()) {
    try {
      out.zeros = closed_form(wf, H, t);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnsupportedHamiltonian) throw;
      out.zeros = integrate(wf, H, grid).zeros_at(0);
    }
  }
  return normalized(out);
}

/// Rotates Im(g0) so that eval_form(wf, z_ref) has the phase of `reference`.
inline WavefunctionForm align_phase(WavefunctionForm wf, cplx z_ref, cplx reference)
{
  const cplx here = eval_form(wf, z_ref);
  if (here == cplx(0.0, 0.0) || reference == cplx(0.0, 0.0))
    throw Error(ErrorCode::InvalidParameter, "phase reference point is a zero");
  wf.g0 += cplx(0.0, std::arg(reference / here));
  return wf;
}

} // namespace stellar

#endif // STELLAR_DYNAMICS_HPP
