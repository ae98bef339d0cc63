#ifndef STELLAR_PHASE_HPP
#define STELLAR_PHASE_HPP

// Phase-shift dynamics (H = n + 1/2): explicit zero matrix, real-axis
// crossings, disc separation and the antipodal symmetry.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "stellar/assignment.hpp"
#include "stellar/dynamics.hpp"
#include "stellar/errors.hpp"
#include "stellar/polynomial.hpp"
#include "stellar/wavefunction.hpp"

namespace stellar {

/// Lambda(t) = (cos t - 2i g2 sin t) Lambda0 + sin t [-i g1 I - i diag(S) + P]
/// with S_j = sum_{m != j} 1/(l_j - l_m) and P_jk = i/(l_j - l_k).
inline MatrixXc phase_shift_matrix(std::span<const cplx> zeros0, cplx g2_0, cplx g1_0, double t)
{
  if (min_pairwise_gap(zeros0) <= kCollisionGap)
    throw Error(ErrorCode::DegenerateInitialZeros, "initial zeros are not distinct");
  const cplx I(0.0, 1.0);
  const auto r = static_cast<Eigen::Index>(zeros0.size());
  const double c = std::cos(t), s = std::sin(t);
  const cplx rot = c - 2.0 * I * g2_0 * s;
  MatrixXc m = MatrixXc::Zero(r, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    const cplx lj = zeros0[static_cast<std::size_t>(j)];
    cplx sum = 0.0;
    for (Eigen::Index k = 0; k < r; ++k) {
      if (k == j) continue;
      const cplx inv = 1.0 / (lj - zeros0[static_cast<std::size_t>(k)]);
      sum += inv;
      m(j, k) = s * I * inv;
    }
    m(j, j) = rot * lj + s * (-I * g1_0 - I * sum);
  }
  return m;
}

inline MatrixXc phase_shift_matrix(std::span<const cplx> zeros0, cplx g2_0, double t)
{
  return phase_shift_matrix(zeros0, g2_0, cplx(0.0, 0.0), t);
}

enum class CrossingFlag { Crossing, AlwaysReal };

inline const char* to_string(CrossingFlag f) { return f == CrossingFlag::Crossing ? "crossing" : "always_real"; }

struct CrossingEvent {
  int zero_index = 0;
  double t_star = 0.0;
  double x_star = 0.0;
  double refinement_width = 0.0;
  CrossingFlag flag = CrossingFlag::Crossing;
};

struct CrossingOptions {
  double real_band = 1e-12;
  double width = 1e-10;
  double tie_tolerance = 1e-12;
  double dedup_window = 1e-6;
  std::size_t min_samples = 256;
};

namespace detail {

/// Zeros at time t from the trajectory's own initial form and Hamiltonian.
inline std::vector<cplx> exact_zeros(const ZeroTrajectory& traj, const LaxData* lx, double t)
{
  if (lx) return closed_form(*lx, t);
  const double grid[1] = {t};
  if (t == 0.0) return traj.initial.zeros;
  return integrate(traj.initial, traj.hamiltonian, grid).zeros_at(0);
}

inline cplx nearest(std::span<const cplx> candidates, cplx target, double tie_tol)
{
  std::size_t best = 0;
  double d0 = std::numeric_limits<double>::infinity(), d1 = d0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double d = std::abs(candidates[i] - target);
    if (d < d0) {
      d1 = d0;
      d0 = d;
      best = i;
    } else if (d < d1) {
      d1 = d;
    }
  }
  if (candidates.size() > 1 && d1 - d0 <= tie_tol)
    throw Error(ErrorCode::TrackingAmbiguity, "two eigenvalues equally close to the tracked zero");
  return candidates[best];
}

inline double wrap_period(double t)
{
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(t, two_pi);
  if (w < 0.0) w += two_pi;
  if (two_pi - w < 1e-12) w = 0.0;
  return w;
}

} // namespace detail

/// Real-axis events of every tracked zero over the sampled window.
inline std::vector<CrossingEvent> detect_crossings(const ZeroTrajectory& traj, const CrossingOptions& opt = {})
{
  if (traj.times.size() < opt.min_samples)
    throw Error(ErrorCode::InvalidParameter, "crossing detection needs at least " + std::to_string(opt.min_samples) +
                                                 " samples");
  std::unique_ptr<LaxData> lx;
  if (!traj.initial.zeros.empty()) {
    try {
      lx = std::make_unique<LaxData>(lax_data(traj.initial, traj.hamiltonian));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnsupportedHamiltonian) throw;
    }
  }

  std::vector<CrossingEvent> events;
  auto add_event = [&](const CrossingEvent& ev) {
    for (const CrossingEvent& other : events) {
      if (other.zero_index != ev.zero_index) continue;
      const double dt = std::abs(other.t_star - ev.t_star);
      if (std::min(dt, 2.0 * std::numbers::pi - dt) < opt.dedup_window) return;
    }
    events.push_back(ev);
  };

  for (std::size_t k = 0; k < traj.rank(); ++k) {
    const std::vector<cplx>& path = traj.paths[k];
    const bool always_real = std::all_of(path.begin(), path.end(),
                                         [&](cplx z) { return std::abs(z.imag()) <= opt.real_band; });
    if (always_real) {
      add_event({static_cast<int>(k), detail::wrap_period(traj.times.front()), path.front().real(), 0.0,
                 CrossingFlag::AlwaysReal});
      continue;
    }
    for (std::size_t i = 0; i < path.size(); ++i) {
      const double im = path[i].imag();
      if (std::abs(im) <= opt.real_band) {
        add_event({static_cast<int>(k), detail::wrap_period(traj.times[i]), path[i].real(), 0.0,
                   CrossingFlag::Crossing});
        continue;
      }
      if (i + 1 == path.size()) break;
      const double im_next = path[i + 1].imag();
      if (std::abs(im_next) <= opt.real_band || (im > 0.0) == (im_next > 0.0)) continue;

      // Bisection on the exact zeros, following the nearest eigenvalue.
      double lo = traj.times[i], hi = traj.times[i + 1];
      cplx z_lo = path[i], z_hi = path[i + 1];
      while (hi - lo > opt.width) {
        const double mid = 0.5 * (lo + hi);
        const cplx guess = 0.5 * (z_lo + z_hi);
        const cplx z_mid = detail::nearest(detail::exact_zeros(traj, lx.get(), mid), guess, opt.tie_tolerance);
        if (std::abs(z_mid.imag()) <= opt.real_band) {
          lo = hi = mid;
          z_lo = z_hi = z_mid;
          break;
        }
        if ((z_mid.imag() > 0.0) == (z_lo.imag() > 0.0)) {
          lo = mid;
          z_lo = z_mid;
        } else {
          hi = mid;
          z_hi = z_mid;
        }
      }
      const double t_star = 0.5 * (lo + hi);
      const cplx z_star = std::abs(z_lo.imag()) < std::abs(z_hi.imag()) ? z_lo : z_hi;
      add_event({static_cast<int>(k), detail::wrap_period(t_star), z_star.real(), hi - lo, CrossingFlag::Crossing});
    }
  }
  std::sort(events.begin(), events.end(), [](const CrossingEvent& a, const CrossingEvent& b) {
    return a.zero_index != b.zero_index ? a.zero_index < b.zero_index : a.t_star < b.t_star;
  });
  return events;
}

struct GershgorinReport {
  std::vector<std::vector<double>> radii; // radii[i][sample]
  std::vector<double> t_samples;
  double min_separation = std::numeric_limits<double>::infinity();
  double threshold = 0.0;
  bool separation_condition = false; // min_separation >= threshold
  bool discs_disjoint_all_t = true;
  bool certified = false; // separation_condition with real g2
};

/// Disc test on the phase-shift matrix: centers are its diagonal and
/// R_i(t) = |sin t| sum_{j != i} 1/|l_i - l_j|.
inline GershgorinReport gershgorin_check(std::span<const cplx> zeros0, cplx g2_0, cplx g1_0, int t_samples)
{
  if (t_samples < 1) throw Error(ErrorCode::InvalidParameter, "need at least one time sample");
  if (!(g2_0.real() < 0.0)) throw Error(ErrorCode::InvalidParameter, "Re(g2) must be negative");
  const std::size_t r = zeros0.size();
  GershgorinReport rep;
  rep.min_separation = min_pairwise_gap(zeros0);
  rep.threshold = std::sqrt(static_cast<double>(r > 0 ? r - 1 : 0) / std::abs(g2_0.real()));
  rep.separation_condition = rep.min_separation >= rep.threshold;
  rep.certified = rep.separation_condition && g2_0.imag() == 0.0;
  rep.radii.assign(r, {});

  std::vector<double> inv_sum(r, 0.0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      if (i != j) inv_sum[i] += 1.0 / std::abs(zeros0[i] - zeros0[j]);

  for (int n = 0; n < t_samples; ++n) {
    const double t = 2.0 * std::numbers::pi * n / t_samples;
    rep.t_samples.push_back(t);
    if (r == 0) continue;
    const MatrixXc m = phase_shift_matrix(zeros0, g2_0, g1_0, t);
    const double s = std::abs(std::sin(t));
    for (std::size_t i = 0; i < r; ++i) rep.radii[i].push_back(s * inv_sum[i]);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = i + 1; j < r; ++j) {
        const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
        if (std::abs(m(ii, ii) - m(jj, jj)) - s * inv_sum[i] - s * inv_sum[j] <= 0.0) rep.discs_disjoint_all_t = false;
      }
  }
  return rep;
}

inline GershgorinReport gershgorin_check(std::span<const cplx> zeros0, cplx g2_0, int t_samples)
{
  return gershgorin_check(zeros0, g2_0, cplx(0.0, 0.0), t_samples);
}

enum class AuditVerdict { GuaranteedAndObserved, GuaranteedButMissed, NotGuaranteedObserved, NotGuaranteedNone };

inline const char* to_string(AuditVerdict v)
{
  switch (v) {
    case AuditVerdict::GuaranteedAndObserved: return "GuaranteedAndObserved";
    case AuditVerdict::GuaranteedButMissed: return "GuaranteedButMissed";
    case AuditVerdict::NotGuaranteedObserved: return "NotGuaranteedObserved";
    case AuditVerdict::NotGuaranteedNone: return "NotGuaranteedNone";
  }
  return "Unknown";
}

struct AuditResult {
  AuditVerdict verdict = AuditVerdict::NotGuaranteedNone;
  int events = 0;
  std::vector<int> per_zero;
  GershgorinReport gershgorin;
  std::vector<CrossingEvent> crossings;
};

/// Uniform grid over one period, endpoint included.
inline std::vector<double> period_grid(std::size_t samples = 512)
{
  std::vector<double> t(samples + 1);
  for (std::size_t i = 0; i <= samples; ++i) t[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / samples;
  return t;
}

inline AuditResult crossing_guarantee_audit(const WavefunctionForm& wf, std::size_t samples = 512)
{
  AuditResult out;
  out.gershgorin = gershgorin_check(wf.zeros, wf.g2, wf.g1, static_cast<int>(samples));
  out.per_zero.assign(wf.zeros.size(), 0);
  if (!wf.zeros.empty()) {
    const std::vector<double> grid = period_grid(samples);
    const ZeroTrajectory traj = closed_form_trajectory(wf, QuadraticHamiltonian::number_operator(), grid);
    out.crossings = detect_crossings(traj);
    for (const CrossingEvent& ev : out.crossings) {
      ++out.events;
      ++out.per_zero[static_cast<std::size_t>(ev.zero_index)];
    }
  }
  const int r = static_cast<int>(wf.zeros.size());
  if (out.gershgorin.certified && r > 0) {
    bool each = std::all_of(out.per_zero.begin(), out.per_zero.end(), [](int c) { return c >= 2; });
    out.verdict = (out.events >= 2 * r && each) ? AuditVerdict::GuaranteedAndObserved : AuditVerdict::GuaranteedButMissed;
  } else {
    out.verdict = out.events > 0 ? AuditVerdict::NotGuaranteedObserved : AuditVerdict::NotGuaranteedNone;
  }
  return out;
}

inline AuditResult crossing_guarantee_audit(const StellarState& st, std::size_t samples = 512)
{
  return crossing_guarantee_audit(build_wavefunction(st), samples);
}

/// (#zeros with Im > band, #zeros with Im < -band)
inline std::pair<int, int> imbalance(std::span<const cplx> zeros, double band = 1e-12)
{
  int plus = 0, minus = 0;
  for (const cplx& z : zeros) {
    if (z.imag() > band) ++plus;
    else if (z.imag() < -band) ++minus;
  }
  return {plus, minus};
}

/// Matching distance between {l_i(t)} and {-l_i(t + pi)}.
inline double antipodal_check(const ZeroTrajectory& traj, double t)
{
  if (traj.rank() == 0) return 0.0;
  std::unique_ptr<LaxData> lx;
  try {
    lx = std::make_unique<LaxData>(lax_data(traj.initial, traj.hamiltonian));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnsupportedHamiltonian) throw;
  }
  const std::vector<cplx> a = detail::exact_zeros(traj, lx.get(), t);
  std::vector<cplx> b = detail::exact_zeros(traj, lx.get(), t + std::numbers::pi);
  for (cplx& z : b) z = -z;
  return matching_distance(a, b);
}

} // namespace stellar

#endif // STELLAR_PHASE_HPP
