#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "stellar/stellar.hpp"
#include "test_util.hpp"

using namespace stellar;
using fixtures::Regime;

namespace {

const double kPi = std::numbers::pi;

WavefunctionForm with_zeros(std::vector<cplx> zeros, cplx g2 = -0.5, cplx g1 = 0.0)
{
  WavefunctionForm wf;
  wf.g2 = g2;
  wf.g1 = g1;
  wf.zeros = std::move(zeros);
  return normalized(wf);
}

std::vector<double> linspace(double a, double b, int n)
{
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return t;
}

} // namespace

TEST(OdeRhs, VacuumStationaryUnderNumberOperator)
{
  const OdeRhs r = ode_rhs(-0.5, 0.0, {}, QuadraticHamiltonian::number_operator());
  EXPECT_EQ(r.dg2, cplx(0.0));
  EXPECT_EQ(r.dg1, cplx(0.0));
  EXPECT_TRUE(r.dzeros.empty());
}

TEST(OdeRhs, FockOneZeroAtRest)
{
  const std::vector<cplx> z{0.0};
  const OdeRhs r = ode_rhs(-0.5, 0.0, z, QuadraticHamiltonian::number_operator());
  EXPECT_EQ(r.dzeros[0], cplx(0.0));
}

TEST(OdeRhs, ConstantHamiltonianIsStatic)
{
  const std::vector<cplx> z{cplx(0.3, 1.0), cplx(-1.0, 0.2)};
  const OdeRhs r = ode_rhs(cplx(-0.7, 0.1), cplx(0.2, -0.3), z, QuadraticHamiltonian{0, 0, 0, 0, 0, 2.5});
  EXPECT_EQ(r.dg2, cplx(0.0));
  EXPECT_EQ(r.dg1, cplx(0.0));
  for (const cplx& d : r.dzeros) EXPECT_EQ(d, cplx(0.0));
}

TEST(OdeRhs, CollisionRejected)
{
  const std::vector<cplx> z{cplx(0.3, 1.0), cplx(0.3, 1.0 + 1e-10)};
  EXPECT_STELLAR_ERROR(ode_rhs(-0.5, 0.0, z, QuadraticHamiltonian::number_operator()), ErrorCode::ZeroCollision);
}

TEST(OdeRhs, GaussianCoefficientEquations)
{
  const QuadraticHamiltonian H{0.7, -0.4, 0.3, 0.2, -0.5, 0.1};
  const cplx g2(-0.6, 0.2), g1(0.1, 0.4);
  const OdeRhs r = ode_rhs(g2, g1, {}, H);
  const cplx i(0.0, 1.0);
  EXPECT_LT(std::abs(r.dg2 - (4.0 * i * H.B * g2 * g2 - 2.0 * H.C * g2 - i * H.A)), 1e-15);
  EXPECT_LT(std::abs(r.dg1 - (4.0 * i * H.B * g2 * g1 - H.C * g1 - 2.0 * H.E * g2 - i * H.D)), 1e-15);
}

TEST(Integrate, FockOneStaysAtOrigin)
{
  const WavefunctionForm wf = with_zeros({0.0});
  const ZeroTrajectory traj = integrate(wf, QuadraticHamiltonian::number_operator(), linspace(0, 2 * kPi, 33));
  for (const cplx& z : traj.paths[0]) EXPECT_LT(std::abs(z), 1e-14);
  for (double t : {0.5, 2.0, 5.0})
    EXPECT_LT(std::abs(closed_form(wf, QuadraticHamiltonian::number_operator(), t)[0]), 1e-14);
}

TEST(Integrate, RankZeroFixedPoint)
{
  const ZeroTrajectory traj = integrate(WavefunctionForm{}, QuadraticHamiltonian::number_operator(), linspace(0, 6, 13));
  EXPECT_EQ(traj.rank(), 0u);
  for (const auto& [g2, g1] : traj.gauss_path) {
    EXPECT_LT(std::abs(g2 + 0.5), 1e-14);
    EXPECT_LT(std::abs(g1), 1e-14);
  }
}

TEST(Integrate, AntipodalAtHalfPeriod)
{
  const WavefunctionForm wf = with_zeros({1.0, -1.0});
  const double grid[] = {0.0, kPi};
  const ZeroTrajectory traj = integrate(wf, QuadraticHamiltonian::number_operator(), grid);
  const std::vector<cplx> expect{-1.0, 1.0};
  EXPECT_LT(matching_distance(traj.zeros_at(1), expect), 1e-8);
}

TEST(Integrate, Preconditions)
{
  const WavefunctionForm close = with_zeros({0.0, cplx(0.0, 1e-7)});
  const double grid[] = {0.0, 1.0};
  EXPECT_STELLAR_ERROR(integrate(close, QuadraticHamiltonian::number_operator(), grid), ErrorCode::DegenerateInitialZeros);
  const double bad[] = {0.0, 1.0, 0.5};
  EXPECT_STELLAR_ERROR(integrate(with_zeros({0.0}), QuadraticHamiltonian::number_operator(), bad),
                       ErrorCode::InvalidParameter);
}

TEST(ClosedForm, InitialTimeReturnsZeros)
{
  const WavefunctionForm wf = fixtures::random_form(4, 3);
  const QuadraticHamiltonian H = fixtures::hamiltonian(Regime::Elliptic, 3);
  EXPECT_LT(matching_distance(closed_form(wf, H, 0.0), wf.zeros), 1e-12);
}

TEST(ClosedForm, RankOneRotation)
{
  // lambda' = lambda (C - 4iB g2) with g2 = -1/2, B = 1/2 gives lambda0 e^{it}.
  const WavefunctionForm wf = with_zeros({cplx(0.0, 1.0)});
  for (double t : {0.3, kPi / 2, 2.0, 3 * kPi / 2}) {
    const cplx expect = cplx(0.0, 1.0) * std::exp(cplx(0.0, t));
    EXPECT_LT(std::abs(closed_form(wf, QuadraticHamiltonian::number_operator(), t)[0] - expect), 1e-12);
  }
  const std::vector<double> grid = linspace(0.0, kPi / 2, 5);
  const ZeroTrajectory traj = integrate(wf, QuadraticHamiltonian::number_operator(), grid);
  EXPECT_LT(std::abs(traj.paths[0].back() - cplx(-1.0, 0.0)), 1e-8);
}

TEST(ClosedForm, UnsupportedHamiltonians)
{
  const WavefunctionForm wf = with_zeros({cplx(0.0, 1.0), 1.0});
  EXPECT_STELLAR_ERROR(closed_form(wf, QuadraticHamiltonian{1.0, 0.0, 0.0, 0.0, 0.0, 0.0}, 1.0),
                       ErrorCode::UnsupportedHamiltonian);
  EXPECT_STELLAR_ERROR(closed_form(wf, QuadraticHamiltonian{0.5, 0.5, 1.0, 0.0, 0.0, 0.0}, 1.0),
                       ErrorCode::UnsupportedHamiltonian);
}

TEST(ClosedForm, MatchesIntegrationAllRegimes)
{
  for (Regime regime : {Regime::PhaseShift, Regime::Elliptic, Regime::Hyperbolic})
    for (std::size_t rank = 1; rank <= 5; ++rank)
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const WavefunctionForm wf = fixtures::random_form(rank, seed);
        const QuadraticHamiltonian H = fixtures::hamiltonian(regime, seed * 10 + rank);
        const std::vector<double> grid = fixtures::comparison_grid(H);
        const ZeroTrajectory ode = integrate(wf, H, grid);
        const ZeroTrajectory cf = closed_form_trajectory(wf, H, grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          ASSERT_EQ(ode.zeros_at(i).size(), rank);
          ASSERT_EQ(cf.zeros_at(i).size(), rank);
          worst = std::max(worst, matching_distance(ode.zeros_at(i), cf.zeros_at(i)));
        }
        EXPECT_LE(worst, 1e-6) << "regime " << static_cast<int>(regime) << " rank " << rank << " seed " << seed;
      }
}

TEST(ClosedForm, LiteralRotationSignDisagrees)
{
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const WavefunctionForm wf = fixtures::random_form(3, seed);
    const QuadraticHamiltonian H = fixtures::hamiltonian(Regime::Elliptic, seed);
    const LaxData lx = lax_data(wf, H);
    const std::vector<double> grid = fixtures::comparison_grid(H);
    const ZeroTrajectory ode = integrate(wf, H, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      worst = std::max(worst, matching_distance(ode.zeros_at(i), closed_form(lx, grid[i], RotationSign::Literal)));
  }
  EXPECT_GT(worst, 1e-6);
}

TEST(ClosedForm, LaxMatrixEntries)
{
  const WavefunctionForm wf = fixtures::random_form(3, 8);
  const QuadraticHamiltonian H = fixtures::hamiltonian(Regime::Elliptic, 8);
  const LaxData lx = lax_data(wf, H);
  for (Eigen::Index j = 0; j < 3; ++j)
    for (Eigen::Index k = 0; k < 3; ++k)
      if (j != k) EXPECT_LT(std::abs(lx.Lmat(j, k) - cplx(0.0, 1.0) / (lx.Lambda0(j, j) - lx.Lambda0(k, k))), 1e-12);
  EXPECT_LT(std::abs(std::pow(lx.scale, 4) - 4.0 * H.B * H.B), 1e-12);
  EXPECT_LT(std::abs(lx.shift - (H.C * H.E - 2.0 * H.B * H.D) / H.omega2()), 1e-14);
}

TEST(Trajectory, RankInvarianceAndTracking)
{
  const WavefunctionForm wf = fixtures::random_form(4, 2);
  const QuadraticHamiltonian H = fixtures::hamiltonian(Regime::Hyperbolic, 2);
  const std::vector<double> grid = linspace(0.0, 1.0, 41);
  const ZeroTrajectory cf = closed_form_trajectory(wf, H, grid);
  const ZeroTrajectory ode = integrate(wf, H, grid);
  EXPECT_EQ(cf.rank(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    ASSERT_EQ(cf.paths[k].size(), grid.size());
    // Continuity-matched paths agree with the integrated paths zero by zero.
    const std::size_t m = static_cast<std::size_t>(match_points(cf.zeros_at(0), ode.zeros_at(0))[k]);
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_LT(std::abs(cf.paths[k][i] - ode.paths[m][i]), 1e-6);
  }
}

TEST(SecondOrder, FiniteDifferenceResidual)
{
  OdeOptions tight;
  tight.rtol = 1e-13;
  tight.atol = 1e-15;
  for (Regime regime : {Regime::PhaseShift, Regime::Elliptic, Regime::Hyperbolic}) {
    const WavefunctionForm wf = fixtures::random_form(3, 4);
    const QuadraticHamiltonian H = fixtures::hamiltonian(regime, 43);
    const double t = 0.4, h = 2e-3;
    const double grid[] = {t - 2 * h, t - h, t, t + h, t + 2 * h};
    const ZeroTrajectory traj = integrate(wf, H, grid, tight);
    const std::vector<cplx> acc = second_order_rhs(traj.zeros_at(2), H);
    for (std::size_t k = 0; k < 3; ++k) {
      const cplx fd = (-traj.paths[k][4] + 16.0 * traj.paths[k][3] - 30.0 * traj.paths[k][2] +
                       16.0 * traj.paths[k][1] - traj.paths[k][0]) /
                      (12.0 * h * h);
      EXPECT_LE(std::abs(fd - acc[k]), 1e-4 * std::max(1.0, std::abs(acc[k])));
    }
  }
}

TEST(Riccati, FiniteDifference)
{
  const QuadraticHamiltonian H{0.6, 0.8, -0.3, 0.2, 0.1, 0.0};
  const double h = 1e-4;
  const double grid[] = {0.7 - h, 0.7, 0.7 + h};
  const auto path = integrate_gaussian(cplx(-0.6, 0.1), cplx(0.2, 0.0), H, grid);
  const cplx g2 = path[1].first;
  const cplx fd = (path[2].first - path[0].first) / (2.0 * h);
  const cplx i(0.0, 1.0);
  EXPECT_LT(std::abs(fd - (4.0 * i * H.B * g2 * g2 - 2.0 * H.C * g2 - i * H.A)), 1e-6);
}

TEST(Reversibility, ForwardThenReversed)
{
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const WavefunctionForm wf = fixtures::random_form(3, seed);
    const QuadraticHamiltonian H = fixtures::hamiltonian(Regime::Elliptic, seed + 20);
    const double t = 1.3;
    const double grid[] = {0.0, t};
    const ZeroTrajectory fwd = integrate(wf, H, grid);
    WavefunctionForm mid = wf;
    mid.g2 = fwd.gauss_path.back().first;
    mid.g1 = fwd.gauss_path.back().second;
    mid.zeros = fwd.zeros_at(1);
    const ZeroTrajectory back = integrate(mid, H.reversed(), grid);
    EXPECT_LT(matching_distance(back.zeros_at(1), wf.zeros), 1e-7);
    EXPECT_LT(std::abs(back.gauss_path.back().first - wf.g2), 1e-7);
  }
}

TEST(EvolveForm, IdentityAtZeroAndConstantHamiltonian)
{
  const WavefunctionForm wf = fixtures::random_form(3, 6);
  const WavefunctionForm a = evolve_form(wf, QuadraticHamiltonian::number_operator(), 0.0);
  EXPECT_LT(matching_distance(a.zeros, wf.zeros), 1e-14);
  const WavefunctionForm b = evolve_form(wf, QuadraticHamiltonian{0, 0, 0, 0, 0, 1.5}, 0.8);
  EXPECT_LT(matching_distance(b.zeros, wf.zeros), 1e-12);
  for (double x : {-1.0, 0.2, 1.4}) EXPECT_NEAR(std::abs(eval_form(b, x)), std::abs(eval_form(wf, x)), 1e-10);
}

TEST(EvolveForm, MatchesNumberBasisOracle)
{
  const StellarState st = random_stellar_state(3, 17, 0.2);
  const QuadraticHamiltonian H = QuadraticHamiltonian::number_operator();
  const double t = 0.7;
  const WavefunctionForm evolved = evolve_form(build_wavefunction(st), H, t);
  const FockVector v = evolve_fock(stellar_to_fock(st, 80), H, t, 80);
  for (double x = -3.0; x <= 3.0; x += 0.5)
    EXPECT_NEAR(std::abs(eval_form(evolved, x)), std::abs(eval_entire_detailed(v, x).value), 1e-6) << x;
  const WavefunctionForm aligned = align_phase(evolved, 0.3, eval_entire_detailed(v, 0.3).value);
  for (double x = -3.0; x <= 3.0; x += 0.5)
    EXPECT_LT(std::abs(eval_form(aligned, x) - eval_entire_detailed(v, x).value), 1e-6) << x;
}

TEST(EvolveForm, FallsBackWhenClosedFormUnsupported)
{
  const WavefunctionForm wf = fixtures::random_form(2, 1);
  const QuadraticHamiltonian H{0.0, 0.0, 0.0, 0.4, 0.3, 0.0}; // linear only: B = 0
  const WavefunctionForm out = evolve_form(wf, H, 0.5);
  const double grid[] = {0.0, 0.5};
  EXPECT_LT(matching_distance(out.zeros, integrate(wf, H, grid).zeros_at(1)), 1e-12);
}

TEST(Ode, DormandPrinceExponential)
{
  const OdeFunction f = [](double, const VectorXc& y) { return VectorXc(cplx(0.0, 1.0) * y); };
  VectorXc y(1);
  y(0) = 1.0;
  double h = 1e-3;
  dopri45_advance(f, 0.0, 2.0, y, h, OdeOptions{});
  EXPECT_LT(std::abs(y(0) - std::exp(cplx(0.0, 2.0))), 1e-9);
}

TEST(Assignment, HungarianOptimal)
{
  Eigen::MatrixXd c(3, 3);
  c << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  const std::vector<int> a = hungarian(c);
  double cost = 0.0;
  for (int i = 0; i < 3; ++i) cost += c(i, a[static_cast<std::size_t>(i)]);
  EXPECT_DOUBLE_EQ(cost, 5.0);
  const std::vector<cplx> p{0.0, 1.0, cplx(0.0, 2.0)}, q{cplx(0.0, 2.1), 0.05, 1.02};
  EXPECT_NEAR(matching_distance(p, q), 0.1, 1e-12);
}
