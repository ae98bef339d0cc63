#ifndef STELLAR_STATE_HPP
#define STELLAR_STATE_HPP

// Single-mode pure states in the number basis and in the finite stellar-rank
// parametrization D(alpha) S(chi) sum_n c_n |n>.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "stellar/errors.hpp"
#include "stellar/ladder.hpp"

namespace stellar {

/// Truncated amplitude list psi_0..psi_N in the number basis.
class FockVector {
public:
  FockVector() : coeffs_(1, cplx(1.0, 0.0)) {}

  explicit FockVector(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs))
  {
    if (coeffs_.empty()) throw Error(ErrorCode::InvalidParameter, "FockVector needs at least one amplitude");
    for (const cplx& c : coeffs_) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw Error(ErrorCode::InvalidParameter, "FockVector amplitude is not finite");
    }
  }

  /// Number state |n> embedded in a basis of size cutoff + 1.
  static FockVector number_state(std::size_t n, std::size_t cutoff)
  {
    if (n > cutoff) throw Error(ErrorCode::InvalidParameter, "number state above cutoff");
    std::vector<cplx> c(cutoff + 1, cplx(0.0, 0.0));
    c[n] = 1.0;
    return FockVector(std::move(c));
  }

  static FockVector from_eigen(const VectorXc& v)
  {
    return FockVector(std::vector<cplx>(v.data(), v.data() + v.size()));
  }

  VectorXc to_eigen() const
  {
    return Eigen::Map<const VectorXc>(coeffs_.data(), static_cast<Eigen::Index>(coeffs_.size()));
  }

  std::size_t cutoff() const noexcept { return coeffs_.size() - 1; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<const cplx> coeffs() const noexcept { return coeffs_; }
  const cplx& operator[](std::size_t n) const { return coeffs_[n]; }

  double norm_squared() const noexcept
  {
    double s = 0.0;
    for (const cplx& c : coeffs_) s += std::norm(c);
    return s;
  }

  double norm() const noexcept { return std::sqrt(norm_squared()); }

  /// Copy restricted (or zero-padded) to a new cutoff.
  FockVector resized(std::size_t cutoff) const
  {
    std::vector<cplx> c(cutoff + 1, cplx(0.0, 0.0));
    std::copy_n(coeffs_.begin(), std::min(c.size(), coeffs_.size()), c.begin());
    return FockVector(std::move(c));
  }

private:
  std::vector<cplx> coeffs_;
};

/// D(alpha) S(chi) sum_{n<=rank} c_n |n> with sum |c_n|^2 = 1 and c_rank != 0.
class StellarState {
public:
  static constexpr double kNormTolerance = 1e-12;
  static constexpr double kLeadingFloor = 1e-12;

  StellarState(std::vector<cplx> core, cplx alpha, cplx chi)
      : core_(std::move(core)), alpha_(alpha), chi_(chi)
  {
    if (core_.empty()) throw Error(ErrorCode::InvalidParameter, "stellar core must hold at least c_0");
    double norm2 = 0.0;
    for (const cplx& c : core_) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw Error(ErrorCode::InvalidParameter, "stellar core coefficient is not finite");
      norm2 += std::norm(c);
    }
    if (std::abs(norm2 - 1.0) > kNormTolerance)
      throw Error(ErrorCode::InvalidParameter, "stellar core is not normalized");
    if (std::abs(core_.back()) <= kLeadingFloor)
      throw Error(ErrorCode::InvalidParameter, "top core coefficient vanishes; declared rank is not exact");
    if (!std::isfinite(std::abs(alpha_)) || !std::isfinite(std::abs(chi_)))
      throw Error(ErrorCode::InvalidParameter, "displacement or squeezing is not finite");
  }

  /// Normalizes the core first; trailing zeros still make the rank check fail.
  static StellarState from_unnormalized(std::vector<cplx> core, cplx alpha, cplx chi)
  {
    double norm2 = 0.0;
    for (const cplx& c : core) norm2 += std::norm(c);
    if (!(norm2 > 0.0)) throw Error(ErrorCode::ZeroVector, "stellar core has zero norm");
    const double inv = 1.0 / std::sqrt(norm2);
    for (cplx& c : core) c *= inv;
    return StellarState(std::move(core), alpha, chi);
  }

  std::size_t rank() const noexcept { return core_.size() - 1; }
  std::span<const cplx> core() const noexcept { return core_; }
  cplx alpha() const noexcept { return alpha_; }
  cplx chi() const noexcept { return chi_; }

private:
  std::vector<cplx> core_;
  cplx alpha_;
  cplx chi_;
};

enum class Verdict { Converged, Diverged, Inconclusive };

inline const char* to_string(Verdict v)
{
  switch (v) {
    case Verdict::Converged: return "Converged";
    case Verdict::Diverged: return "Diverged";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

struct EnergyMomentReport {
  double s = 0.0;
  double partial_sum = 0.0;
  double tail_estimate = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

inline FockVector normalize(const FockVector& v)
{
  const double n = v.norm();
  if (!(n >= 1e-300)) throw Error(ErrorCode::ZeroVector, "cannot normalize a vector of norm below 1e-300");
  std::vector<cplx> c(v.coeffs().begin(), v.coeffs().end());
  for (cplx& x : c) x /= n;
  return FockVector(std::move(c));
}

/// Options for the geometric-ratio verdict of energy_moment.
struct EnergyMomentOptions {
  std::size_t fit_terms = 10;
  double ratio_margin = 1e-3;
  /// Amplitudes below this fraction of the largest one count as zero.
  double amplitude_floor = 1e-150;
};

/// Partial sum of s^n |psi_n|^2 and a verdict on whether the full series is finite.
///
/// The verdict fits log(s^n |psi_n|^2) against n over the last `fit_terms`
/// nonzero amplitudes. A fitted ratio below 1 - margin extrapolates the tail
/// geometrically; the series converges when that tail is below `tol`.
inline EnergyMomentReport energy_moment(const FockVector& v, double s, double tol,
                                        const EnergyMomentOptions& opt = {})
{
  if (!(s > 1.0)) throw Error(ErrorCode::InvalidParameter, "energy moment needs s > 1");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidParameter, "energy moment needs a positive tolerance");

  EnergyMomentReport rep;
  rep.s = s;
  const double log_s = std::log(s);
  double max_amp = 0.0;
  for (const cplx& c : v.coeffs()) max_amp = std::max(max_amp, std::abs(c));

  std::vector<std::pair<double, double>> samples; // (n, log term)
  double sum = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    const double amp = std::abs(v[n]);
    if (amp == 0.0) continue;
    sum += std::exp(static_cast<double>(n) * log_s + 2.0 * std::log(amp));
    if (amp > opt.amplitude_floor * max_amp && amp > 1e-300)
      samples.emplace_back(static_cast<double>(n), static_cast<double>(n) * log_s + 2.0 * std::log(amp));
  }
  rep.partial_sum = sum;

  const double last_index = samples.empty() ? 0.0 : samples.back().first;
  const bool decayed = last_index + static_cast<double>(opt.fit_terms) <= static_cast<double>(v.cutoff());
  if (samples.size() < opt.fit_terms) {
    // Too few nonzero terms to fit; only an effectively finite support is conclusive.
    if (decayed) {
      rep.tail_estimate = 0.0;
      rep.verdict = tol > 0.0 ? Verdict::Converged : Verdict::Inconclusive;
    } else {
      rep.tail_estimate = std::numeric_limits<double>::infinity();
      rep.verdict = Verdict::Inconclusive;
    }
    return rep;
  }

  // Least-squares slope over the last fit_terms samples.
  const std::size_t first = samples.size() - opt.fit_terms;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = first; i < samples.size(); ++i) {
    mx += samples[i].first;
    my += samples[i].second;
  }
  const double m = static_cast<double>(opt.fit_terms);
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = first; i < samples.size(); ++i) {
    sxx += (samples[i].first - mx) * (samples[i].first - mx);
    sxy += (samples[i].first - mx) * (samples[i].second - my);
  }
  const double ratio = std::exp(sxy / sxx);

  if (ratio < 1.0 - opt.ratio_margin) {
    const double last_term = std::exp(samples.back().second);
    // Remaining indices after the last sample continue the geometric decay.
    rep.tail_estimate = last_term * ratio / (1.0 - ratio);
    rep.verdict = rep.tail_estimate < tol ? Verdict::Converged : Verdict::Inconclusive;
  } else if (ratio > 1.0 + opt.ratio_margin) {
    rep.tail_estimate = std::numeric_limits<double>::infinity();
    rep.verdict = Verdict::Diverged;
  } else {
    rep.tail_estimate = std::numeric_limits<double>::infinity();
    rep.verdict = Verdict::Inconclusive;
  }
  return rep;
}

/// Unnormalized creation operator: psi_n -> sqrt(n) psi_{n-1}, one level longer.
inline FockVector apply_creation(const FockVector& v)
{
  std::vector<cplx> c(v.size() + 1, cplx(0.0, 0.0));
  for (std::size_t n = 0; n < v.size(); ++n) c[n + 1] = std::sqrt(static_cast<double>(n + 1)) * v[n];
  return FockVector(std::move(c));
}

/// Squeezed vacuum S(chi)|0> from its closed-form even-number expansion.
inline FockVector squeezed_vacuum_fock(cplx chi, std::size_t cutoff, bool renormalize = false)
{
  if (cutoff < 2) throw Error(ErrorCode::InvalidParameter, "squeezed vacuum needs cutoff >= 2");
  const double r = std::abs(chi);
  const double phi = r > 0.0 ? std::arg(chi) : 0.0;
  const cplx step = -std::polar(std::tanh(r), phi);
  std::vector<cplx> c(cutoff + 1, cplx(0.0, 0.0));
  cplx amp = 1.0 / std::sqrt(std::cosh(r));
  for (std::size_t n = 0; 2 * n <= cutoff; ++n) {
    c[2 * n] = amp;
    // psi_{2n+2}/psi_{2n} = step * sqrt((2n+1)(2n+2)) / (2(n+1))
    const double k = static_cast<double>(n);
    amp *= step * std::sqrt((2.0 * k + 1.0) * (2.0 * k + 2.0)) / (2.0 * (k + 1.0));
  }
  FockVector v(std::move(c));
  return renormalize ? normalize(v) : v;
}

/// Default truncation scaled by the mean photon number.
inline std::size_t default_cutoff(const StellarState& st)
{
  const double sh = std::sinh(std::abs(st.chi()));
  const double scale = static_cast<double>(st.rank()) + std::norm(st.alpha()) + sh * sh;
  return std::max<std::size_t>(60, static_cast<std::size_t>(std::ceil(8.0 * scale)));
}

namespace detail {

/// Working dimension for truncated exponentials; the padding absorbs edge reflections.
inline Eigen::Index working_dimension(std::size_t cutoff)
{
  const auto n = static_cast<Eigen::Index>(cutoff + 1);
  return n + std::max<Eigen::Index>(40, n / 2);
}

} // namespace detail

/// D(alpha) S(chi) |core> from exponentials of the truncated generators.
///
/// The exponentials act in a padded working basis; the result is cropped to
/// `cutoff` and rejected if the cropped-away norm reaches 1e-10.
inline FockVector stellar_to_fock(const StellarState& st, std::size_t cutoff)
{
  if (cutoff < st.rank()) throw Error(ErrorCode::CutoffTooSmall, "cutoff below the stellar rank");
  const Eigen::Index dim = detail::working_dimension(cutoff);
  const MatrixXc a = annihilation(dim);
  const MatrixXc ad = a.adjoint();

  VectorXc v = VectorXc::Zero(dim);
  for (std::size_t n = 0; n < st.core().size(); ++n) v(static_cast<Eigen::Index>(n)) = st.core()[n];

  if (std::abs(st.chi()) > 0.0) {
    const MatrixXc gen = 0.5 * (std::conj(st.chi()) * (a * a) - st.chi() * (ad * ad));
    const MatrixXc s = gen.exp();
    v = s * v;
  }
  if (std::abs(st.alpha()) > 0.0) {
    const MatrixXc gen = st.alpha() * ad - std::conj(st.alpha()) * a;
    const MatrixXc d = gen.exp();
    v = d * v;
  }

  const auto keep = static_cast<Eigen::Index>(cutoff + 1);
  const double discarded = v.tail(dim - keep).squaredNorm();
  if (discarded >= 1e-10)
    throw Error(ErrorCode::CutoffTooSmall, "discarded norm " + std::to_string(discarded) + " at cutoff " +
                                               std::to_string(cutoff));
  return FockVector::from_eigen(v.head(keep));
}

inline FockVector stellar_to_fock(const StellarState& st) { return stellar_to_fock(st, default_cutoff(st)); }

/// exp(-i theta n) applied amplitude-wise.
inline FockVector phase_shift(const FockVector& v, double theta)
{
  std::vector<cplx> c(v.size());
  for (std::size_t n = 0; n < v.size(); ++n) c[n] = v[n] * std::polar(1.0, -theta * static_cast<double>(n));
  return FockVector(std::move(c));
}

/// Seeded fixture: complex-normal core, alpha and chi uniform in the disc of radius `scale`.
inline StellarState random_stellar_state(std::size_t rank, std::uint64_t seed, double scale = 1.0)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<cplx> core(rank + 1);
  for (cplx& c : core) c = cplx(gauss(rng), gauss(rng));
  double norm2 = 0.0;
  for (const cplx& c : core) norm2 += std::norm(c);
  while (std::abs(core.back()) <= 1e-6 * std::sqrt(norm2)) {
    core.back() = cplx(gauss(rng), gauss(rng));
    norm2 = 0.0;
    for (const cplx& c : core) norm2 += std::norm(c);
  }

  auto in_disc = [&]() {
    const double radius = scale * std::sqrt(unit(rng));
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    return std::polar(radius, angle);
  };
  const cplx alpha = in_disc();
  const cplx chi = in_disc();
  return StellarState::from_unnormalized(std::move(core), alpha, chi);
}

} // namespace stellar

#endif // STELLAR_STATE_HPP
