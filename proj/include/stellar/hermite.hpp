#ifndef STELLAR_HERMITE_HPP
#define STELLAR_HERMITE_HPP

// Entire extensions of a truncated number-basis vector: the position
// wavefunction through Hermite functions, and the stellar (Bargmann) function.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "stellar/errors.hpp"
#include "stellar/state.hpp"

namespace stellar {

struct EntireEval {
  cplx value;
  double error_estimate = 0.0; // recurrence rounding, absolute
  double tail_estimate = 0.0;  // last two retained terms, a truncation indicator for infinite series
};

/// sum_n psi_n h_n(z) with normalized Hermite functions h_n.
///
/// h_{n+1} = sqrt(2/(n+1)) z h_n - sqrt(n/(n+1)) h_{n-1}, h_0 = pi^{-1/4} e^{-z^2/2}.
/// The pair (h_n, h_{n-1}) is rescaled whenever it grows past 1e150 and the
/// accumulated power of two is restored at the end.
inline EntireEval eval_entire_detailed(const FockVector& v, cplx z)
{
  constexpr double kBig = 1e150;
  const double inv_quartic_pi = std::pow(std::numbers::pi, -0.25);

  cplx h_prev = 0.0;
  cplx h = 1.0;
  double log_scale = 0.0; // natural log of the factor removed from h
  cplx sum = v[0] * h;
  double abs_sum = std::abs(v[0]);
  double tail = 0.0;
  const std::size_t n_max = v.cutoff();

  for (std::size_t n = 0; n < n_max; ++n) {
    const double dn = static_cast<double>(n);
    const cplx h_next = std::sqrt(2.0 / (dn + 1.0)) * z * h - std::sqrt(dn / (dn + 1.0)) * h_prev;
    h_prev = h;
    h = h_next;
    const cplx term = v[n + 1] * h;
    sum += term;
    abs_sum += std::abs(term);
    if (std::abs(h) > kBig) {
      const double f = 1.0 / kBig;
      h *= f;
      h_prev *= f;
      sum *= f;
      abs_sum *= f;
      log_scale += std::log(kBig);
    }
  }

  // Truncation: magnitude of the last two retained terms.
  tail = std::abs(v[n_max] * h);
  if (n_max >= 1) tail += std::abs(v[n_max - 1] * h_prev);

  const cplx gauss = std::exp(-0.5 * z * z + log_scale);
  const double factor = inv_quartic_pi * std::abs(gauss);
  EntireEval out;
  out.value = inv_quartic_pi * gauss * sum;
  out.error_estimate = factor * 8.0 * std::numeric_limits<double>::epsilon() * abs_sum;
  out.tail_estimate = factor * tail;
  return out;
}

/// Throws PrecisionLoss when the rounding estimate exceeds `rel_tol`·|value|.
inline cplx eval_entire(const FockVector& v, cplx z, double rel_tol = 1e-8)
{
  const EntireEval e = eval_entire_detailed(v, z);
  if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag()) || e.error_estimate > rel_tol * std::abs(e.value))
    throw Error(ErrorCode::PrecisionLoss, "Hermite series error estimate " + std::to_string(e.error_estimate) +
                                              " against value " + std::to_string(std::abs(e.value)));
  return e.value;
}

/// F*(z) = sum_n psi_n z^n / sqrt(n!)
inline cplx stellar_eval(const FockVector& v, cplx z)
{
  cplx term = 1.0;
  cplx sum = v[0];
  for (std::size_t n = 1; n < v.size(); ++n) {
    term *= z / std::sqrt(static_cast<double>(n));
    sum += v[n] * term;
  }
  return sum;
}

} // namespace stellar

#endif // STELLAR_HERMITE_HPP
