// Build a rank-2 state, print its closed form and compare with the Hermite series.

#include <cstdio>

#include "stellar/stellar.hpp"

int main()
{
  using namespace stellar;
  const StellarState st = StellarState::from_unnormalized({{0.3, 0.0}, {0.0, 0.2}, {1.0, 0.0}}, {0.1, 0.05}, {0.15, 0.0});
  const WavefunctionForm wf = build_wavefunction(st);
  std::printf("g2 = %.6f%+.6fi  g1 = %.6f%+.6fi\n", wf.g2.real(), wf.g2.imag(), wf.g1.real(), wf.g1.imag());
  for (const cplx& z : wf.zeros) std::printf("zero  %.12f%+.12fi\n", z.real(), z.imag());

  const FockVector v = stellar_to_fock(st, 80);
  const cplx z(0.7, -0.4);
  const cplx a = eval_form(wf, z);
  const cplx b = eval_entire(v, z);
  std::printf("psi(0.7-0.4i): closed %.12e%+.12ei  series %.12e%+.12ei\n", a.real(), a.imag(), b.real(), b.imag());

  const HudsonResult h = hudson_test(st, 4.0);
  std::printf("zeros counted in the box: %d (%s)\n", h.count, h.gaussian ? "Gaussian" : "non-Gaussian");
  return 0;
}
