#ifndef STELLAR_WAVEFUNCTION_HPP
#define STELLAR_WAVEFUNCTION_HPP

// Closed polynomial-times-Gaussian form of finite-rank wavefunctions,
// growth constants, and the zero-existence (Hudson) test.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stellar/contour.hpp"
#include "stellar/errors.hpp"
#include "stellar/hermite.hpp"
#include "stellar/polynomial.hpp"
#include "stellar/state.hpp"

namespace stellar {

/// psi(z) = leading * prod_k (z - zeros[k]) * exp(g2 z^2 + g1 z + g0)
struct WavefunctionForm {
  cplx g2{-0.5, 0.0};
  cplx g1{0.0, 0.0};
  cplx g0{-0.25 * std::log(std::numbers::pi), 0.0};
  std::vector<cplx> zeros;
  cplx leading{1.0, 0.0};

  std::size_t rank() const noexcept { return zeros.size(); }

  void validate() const
  {
    if (!(g2.real() < 0.0)) throw Error(ErrorCode::InvalidParameter, "Re(g2) must be negative");
    if (leading == cplx(0.0, 0.0)) throw Error(ErrorCode::InvalidParameter, "leading coefficient is zero");
    auto finite = [](cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); };
    if (!finite(g2) || !finite(g1) || !finite(g0) || !finite(leading))
      throw Error(ErrorCode::InvalidParameter, "form coefficient is not finite");
    for (const cplx& z : zeros)
      if (!finite(z)) throw Error(ErrorCode::InvalidParameter, "zero is not finite");
  }
};

inline cplx eval_form(const WavefunctionForm& wf, cplx z)
{
  cplx p = wf.leading;
  for (const cplx& l : wf.zeros) p *= (z - l);
  return p * std::exp(wf.g2 * z * z + wf.g1 * z + wf.g0);
}

/// Gauss-Hermite rule (weight e^{-x^2}) by Golub-Welsch.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussHermiteRule gauss_hermite(int n)
{
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  GaussHermiteRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    rule.nodes[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    rule.weights[static_cast<std::size_t>(k)] = std::sqrt(std::numbers::pi) * v0 * v0;
  }
  return rule;
}

inline const GaussHermiteRule& gauss_hermite_257()
{
  static const GaussHermiteRule rule = gauss_hermite(257);
  return rule;
}

/// ln of the integral of |psi(x)|^2 over the real line.
inline double log_norm_squared(const WavefunctionForm& wf)
{
  const double a = -2.0 * wf.g2.real();
  const double b = 2.0 * wf.g1.real();
  if (!(a > 0.0)) throw Error(ErrorCode::InvalidParameter, "Re(g2) must be negative");
  // exp(-a x^2 + b x) = exp(b^2/4a) exp(-a (x - m)^2), m = b/2a
  const double m = b / (2.0 * a);
  const double inv_sqrt_a = 1.0 / std::sqrt(a);
  const GaussHermiteRule& rule = gauss_hermite_257();
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = m + rule.nodes[i] * inv_sqrt_a;
    cplx p = wf.leading;
    for (const cplx& l : wf.zeros) p *= (x - l);
    acc += rule.weights[i] * std::norm(p);
  }
  return std::log(acc) + b * b / (4.0 * a) - 0.5 * std::log(a) + 2.0 * wf.g0.real();
}

/// Adjusts Re(g0) so that the form has unit norm on the real line.
inline WavefunctionForm normalized(WavefunctionForm wf)
{
  wf.g0 -= 0.5 * log_norm_squared(wf);
  return wf;
}

/// Wavefunction of D(alpha) S(chi)|0>.
inline WavefunctionForm gaussian_packet_params(cplx alpha, cplx chi)
{
  const double r = std::abs(chi);
  const double phi = r > 0.0 ? std::arg(chi) : 0.0;
  const cplx tau = std::polar(std::tanh(r), phi);
  WavefunctionForm wf;
  wf.g2 = -(1.0 + tau) / (2.0 * (1.0 - tau));
  const double x0 = std::sqrt(2.0) * alpha.real();
  const double p0 = std::sqrt(2.0) * alpha.imag();
  wf.g1 = -2.0 * wf.g2 * x0 + cplx(0.0, p0);
  const double im_g0 = 0.5 * std::arg(0.5 - wf.g2) - 0.5 * x0 * p0 + (wf.g2 * x0 * x0).imag();
  wf.g0 = cplx(0.0, im_g0);
  wf.leading = 1.0;
  return normalized(wf);
}

namespace detail {

using Poly = std::vector<cplx>;

/// p -> x p (coefficients lowest first).
inline Poly times_x(const Poly& p)
{
  Poly out(p.size() + 1, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < p.size(); ++k) out[k + 1] = p[k];
  return out;
}

inline Poly derivative(const Poly& p)
{
  if (p.size() <= 1) return {cplx(0.0, 0.0)};
  Poly out(p.size() - 1);
  for (std::size_t k = 1; k < p.size(); ++k) out[k - 1] = static_cast<double>(k) * p[k];
  return out;
}

inline Poly add_scaled(Poly a, const Poly& b, cplx s)
{
  if (a.size() < b.size()) a.resize(b.size(), cplx(0.0, 0.0));
  for (std::size_t k = 0; k < b.size(); ++k) a[k] += s * b[k];
  return a;
}

} // namespace detail

/// Polynomial prefactor P with psi = P e^{g} for D S sum c_n |n>, where e^{g} is the packet.
///
/// Uses D S a^dag S^dag D^dag = cosh r (a^dag - alpha*) + e^{-i phi} sinh r (a - alpha)
/// acting on p e^{g}: a^dag -> (x p - p' - p g')/sqrt2, a -> (x p + p' + p g')/sqrt2.
inline std::vector<cplx> stellar_polynomial(const StellarState& st, const WavefunctionForm& packet)
{
  using detail::Poly;
  const double r = std::abs(st.chi());
  const double phi = r > 0.0 ? std::arg(st.chi()) : 0.0;
  const double ch = std::cosh(r);
  const cplx sh = std::polar(std::sinh(r), -phi);
  const cplx alpha = st.alpha();
  const Poly gprime{packet.g1, 2.0 * packet.g2}; // g'(x)
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  auto multiply = [](const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
  };

  auto apply_t = [&](const Poly& p) {
    const Poly xp = detail::times_x(p);
    const Poly dp = detail::add_scaled(detail::derivative(p), multiply(p, gprime), 1.0); // p' + p g'
    const Poly create = detail::add_scaled(xp, dp, -1.0);
    const Poly annihilate = detail::add_scaled(xp, dp, 1.0);
    Poly out = detail::add_scaled(Poly{}, create, ch * inv_sqrt2);
    out = detail::add_scaled(out, p, -ch * std::conj(alpha));
    out = detail::add_scaled(out, annihilate, sh * inv_sqrt2);
    out = detail::add_scaled(out, p, -sh * alpha);
    return out;
  };

  Poly power{cplx(1.0, 0.0)};
  Poly total = detail::add_scaled(Poly{}, power, st.core()[0]);
  double inv_sqrt_fact = 1.0;
  for (std::size_t n = 1; n < st.core().size(); ++n) {
    power = apply_t(power);
    inv_sqrt_fact /= std::sqrt(static_cast<double>(n));
    total = detail::add_scaled(total, power, st.core()[n] * inv_sqrt_fact);
  }
  // T^n raises the degree by exactly n.
  total.resize(st.rank() + 1, cplx(0.0, 0.0));
  return total;
}

inline WavefunctionForm build_wavefunction(const StellarState& st)
{
  const WavefunctionForm packet = gaussian_packet_params(st.alpha(), st.chi());
  const std::vector<cplx> poly = stellar_polynomial(st, packet);
  double scale = 0.0;
  for (const cplx& c : poly) scale = std::max(scale, std::abs(c));
  if (std::abs(poly.back()) < 1e-12 * scale)
    throw Error(ErrorCode::DegenerateLeadingCoefficient, "leading polynomial coefficient collapsed numerically");

  WavefunctionForm wf = packet;
  wf.leading = poly.back();
  wf.zeros = roots_polynomial(poly);
  return normalized(wf);
}

struct GrowthBound {
  double K_bound = 0.0;
  double L_bound = 0.0;
  double s_used = 0.0;
  double alpha_used = 0.0;
  double C_used = 1.0;
};

/// Constants K, L with |psi(z)|^2 <= K exp(L |z|^2).
///
/// C is the finite-cutoff surrogate max_{p <= N} t^p sqrt(2p+1) / s^{(2p+1)/4}
/// with t = s^alpha, clamped below by 1. alpha = 0 makes L infinite, so the
/// open interval (0, 1/2) is required.
inline GrowthBound growth_bound(const FockVector& v, double s, double alpha, double tol = 1e-8)
{
  if (!(s > 1.0)) throw Error(ErrorCode::InvalidParameter, "growth bound needs s > 1");
  if (!(alpha > 0.0 && alpha < 0.5)) throw Error(ErrorCode::InvalidParameter, "growth bound needs 0 < alpha < 1/2");
  const EnergyMomentReport rep = energy_moment(v, s, tol);
  if (rep.verdict != Verdict::Converged)
    throw Error(ErrorCode::InvalidParameter, "energy moment does not converge at this s");

  const double t = std::pow(s, alpha);
  double log_c = 0.0;
  for (std::size_t p = 0; p <= v.cutoff(); ++p) {
    const double dp = static_cast<double>(p);
    log_c = std::max(log_c, dp * std::log(t) + 0.5 * std::log(2.0 * dp + 1.0) - 0.25 * (2.0 * dp + 1.0) * std::log(s));
  }
  GrowthBound gb;
  gb.s_used = s;
  gb.alpha_used = alpha;
  gb.C_used = std::exp(log_c);
  const double rs = std::sqrt(s);
  gb.K_bound = gb.C_used * gb.C_used * rs / ((rs - 1.0) * std::sqrt(std::numbers::pi)) * rep.partial_sum;
  gb.L_bound = 1.0 + 2.0 / std::numbers::e + 8.0 / (t - 1.0);
  return gb;
}

struct HudsonResult {
  bool gaussian = true;
  int count = 0;
};

/// Zero count of the Hermite-series wavefunction of st inside |Re z|, |Im z| <= halfwidth.
///
/// The count runs on the number-basis vector, independent of the closed form;
/// the closed-form zeros only certify that the box is large enough.
inline HudsonResult hudson_test(const StellarState& st, double box_halfwidth, std::size_t cutoff = 0)
{
  const WavefunctionForm wf = build_wavefunction(st);
  const Box box = Box::centered(box_halfwidth);
  for (const cplx& z : wf.zeros)
    if (!box.contains(z)) throw Error(ErrorCode::InvalidParameter, "box does not contain every zero");
  // Truncated Hermite series grow spurious zeros near |z|^2 ~ N/8; keep them outside the box.
  if (cutoff == 0)
    cutoff = std::max(default_cutoff(st), static_cast<std::size_t>(std::ceil(8.0 * box_halfwidth * box_halfwidth)));
  const FockVector v = stellar_to_fock(st, cutoff);
  const int count = count_zeros_box([&](cplx z) { return eval_entire_detailed(v, z).value; }, box, 32);
  return {count == 0, count};
}

} // namespace stellar

#endif // STELLAR_WAVEFUNCTION_HPP
