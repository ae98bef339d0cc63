#ifndef STELLAR_TESTS_FIXTURES_HPP
#define STELLAR_TESTS_FIXTURES_HPP

// Seeded test fixtures shared by the unit tests and the acceptance runner.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "stellar/stellar.hpp"

namespace fixtures {

using stellar::cplx;
using stellar::QuadraticHamiltonian;
using stellar::WavefunctionForm;

/// Zeros uniform in [-w, w] x [-h, h] with pairwise gap >= min_gap.
inline std::vector<cplx> spread_zeros(std::mt19937_64& rng, std::size_t rank, double w, double h, double min_gap,
                                      double min_abs_im = 0.0)
{
  std::uniform_real_distribution<double> ux(-w, w), uy(-h, h);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<cplx> z;
    for (std::size_t k = 0; k < rank; ++k) {
      double y = uy(rng);
      while (std::abs(y) < min_abs_im) y = uy(rng);
      z.emplace_back(ux(rng), y);
    }
    if (stellar::min_pairwise_gap(z) >= min_gap) return z;
  }
  throw std::runtime_error("could not place separated zeros");
}

/// Generic normalized form: complex g2 with Re g2 in [-1, -0.3], small g1.
inline WavefunctionForm random_form(std::size_t rank, std::uint64_t seed, double min_gap = 0.1)
{
  std::mt19937_64 rng(seed * 7919 + rank);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  WavefunctionForm wf;
  wf.g2 = cplx(-(0.3 + 0.7 * u(rng)), 0.4 * (u(rng) - 0.5));
  wf.g1 = cplx(0.6 * (u(rng) - 0.5), 0.6 * (u(rng) - 0.5));
  wf.zeros = spread_zeros(rng, rank, 2.0, 1.5, min_gap);
  wf.leading = std::polar(1.0, 2.0 * std::numbers::pi * u(rng));
  return stellar::normalized(wf);
}

/// Real g2, g1 = 0, zeros off the real axis and separated by the disc threshold.
inline WavefunctionForm separated_form(std::size_t rank, std::uint64_t seed)
{
  std::mt19937_64 rng(seed * 104729 + rank);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  WavefunctionForm wf;
  const double a = 0.5 + u(rng);
  wf.g2 = cplx(-a, 0.0);
  wf.g1 = 0.0;
  const double threshold = std::sqrt(static_cast<double>(rank - 1) / a);
  wf.zeros = spread_zeros(rng, rank, 1.0 + 1.2 * threshold * static_cast<double>(rank), 2.0, threshold, 0.05);
  return stellar::normalized(wf);
}

/// Simple zeros with more zeros above the real axis than below (or the reverse).
inline WavefunctionForm imbalanced_form(std::size_t rank, std::uint64_t seed)
{
  std::mt19937_64 rng(seed * 15485863 + rank);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    WavefunctionForm wf = random_form(rank, seed * 31 + static_cast<std::uint64_t>(1000 * u(rng)), 0.1);
    for (cplx& z : wf.zeros)
      if (std::abs(z.imag()) < 0.05) z = cplx(z.real(), z.imag() < 0 ? -0.05 : 0.05);
    const auto [np, nm] = stellar::imbalance(wf.zeros);
    if (np != nm && stellar::min_pairwise_gap(wf.zeros) >= 0.1) return stellar::normalized(wf);
  }
}

enum class Regime { PhaseShift, Elliptic, Hyperbolic };

/// Phase shift, or random coefficients in [-1, 1] with the requested sign of omega^2.
inline QuadraticHamiltonian hamiltonian(Regime regime, std::uint64_t seed)
{
  if (regime == Regime::PhaseShift) return QuadraticHamiltonian::number_operator();
  std::mt19937_64 rng(seed * 2654435761u + static_cast<std::uint64_t>(regime));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    QuadraticHamiltonian H{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    if (std::abs(H.B) < 0.2) continue;
    const double w2 = H.omega2();
    if (regime == Regime::Elliptic && w2 > 0.1) return H;
    if (regime == Regime::Hyperbolic && w2 < -0.1) return H;
  }
}

/// Close to n + 1/2: A, B in [0.4, 0.6], C, D, E in [-0.1, 0.1].
inline QuadraticHamiltonian mild_hamiltonian(std::uint64_t seed)
{
  std::mt19937_64 rng(seed * 40503u + 17u);
  std::uniform_real_distribution<double> ab(0.4, 0.6), small(-0.1, 0.1);
  return {ab(rng), ab(rng), small(rng), small(rng), small(rng), small(rng)};
}

/// Time window of the ODE comparison: 32 samples over one period, clipped to 10.
inline std::vector<double> comparison_grid(const QuadraticHamiltonian& H, std::size_t n = 32)
{
  const double period = 2.0 * std::numbers::pi / std::sqrt(std::abs(H.omega2()));
  const double t_end = std::min(period, 10.0);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = t_end * static_cast<double>(i + 1) / static_cast<double>(n);
  return t;
}

/// Relative deviation of the two wavefunction paths on the 13 x 13 grid |x|, |y| <= 3.
inline double dual_path_deviation(const stellar::FockVector& v, const WavefunctionForm& wf)
{
  double worst = 0.0;
  for (int i = -6; i <= 6; ++i)
    for (int j = -6; j <= 6; ++j) {
      const cplx z(0.5 * i, 0.5 * j);
      const cplx a = stellar::eval_form(wf, z);
      const cplx b = stellar::eval_entire_detailed(v, z).value;
      worst = std::max(worst, std::abs(a - b) / std::abs(a));
    }
  return worst;
}

} // namespace fixtures

#endif // STELLAR_TESTS_FIXTURES_HPP
