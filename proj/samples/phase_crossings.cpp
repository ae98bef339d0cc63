// Follow the zeros of a rank-3 state through one phase-shift period and list real-axis events.

#include <cstdio>

#include "stellar/stellar.hpp"

int main()
{
  using namespace stellar;
  WavefunctionForm wf;
  wf.zeros = {{-2.5, 0.6}, {0.2, -1.1}, {2.4, 0.9}};
  wf = normalized(wf);

  const GershgorinReport g = gershgorin_check(wf.zeros, wf.g2, wf.g1, 256);
  std::printf("min separation %.4f, threshold %.4f, certified %s\n", g.min_separation, g.threshold,
              g.certified ? "yes" : "no");

  const ZeroTrajectory traj = closed_form_trajectory(wf, QuadraticHamiltonian::number_operator(), period_grid(512));
  for (const CrossingEvent& ev : detect_crossings(traj))
    std::printf("zero %d real at t = %.10f, x = %+.10f\n", ev.zero_index, ev.t_star, ev.x_star);
  std::printf("antipodal distance at t = 0.4: %.3e\n", antipodal_check(traj, 0.4));
  return 0;
}
