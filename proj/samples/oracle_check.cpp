// Evolve a random rank-2 state in the number basis and compare its zeros with the matrix solution.

#include <cstdio>
#include <vector>

#include "stellar/stellar.hpp"

int main()
{
  using namespace stellar;
  const StellarState st = random_stellar_state(2, 5, 0.2);
  const WavefunctionForm wf = build_wavefunction(st);
  const QuadraticHamiltonian H{0.55, 0.45, 0.05, 0.1, -0.05, 0.0};
  const FockVector v = stellar_to_fock(st, 80);

  for (double t : {0.3, 1.1, 2.9}) {
    const std::vector<cplx> cf = closed_form(wf, H, t);
    const std::vector<cplx> oracle = zeros_from_fock(evolve_fock(v, H, t, 80), 2, 4.0);
    std::printf("t = %.1f  closed vs oracle: %.3e\n", t, matching_distance(cf, oracle));
  }
  return 0;
}
