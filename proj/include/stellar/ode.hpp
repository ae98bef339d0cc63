#ifndef STELLAR_ODE_HPP
#define STELLAR_ODE_HPP

// Dormand-Prince 5(4) with embedded error control for complex state vectors.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "stellar/errors.hpp"
#include "stellar/ladder.hpp"

namespace stellar {

using OdeFunction = std::function<VectorXc(double, const VectorXc&)>;

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double min_step = 1e-13;
  double initial_step = 1e-3;
  long max_steps = 10'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

/// Advances y from t0 to t1 in place. The last accepted step size is kept in `h`
/// so successive calls continue smoothly.
inline void dopri45_advance(const OdeFunction& f, double t0, double t1, VectorXc& y, double& h,
                            const OdeOptions& opt = {}, OdeStats* stats = nullptr)
{
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // error weights: b - b*
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (t1 == t0) return;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  double t = t0;
  if (!(h > 0.0)) h = opt.initial_step;
  VectorXc k1 = f(t, y);
  long steps = 0;

  while (dir * (t1 - t) > 0.0) {
    if (++steps > opt.max_steps) throw Error(ErrorCode::StepFailure, "step budget exhausted");
    double step = std::min(h, std::abs(t1 - t));
    const bool last = step >= std::abs(t1 - t);
    const double hs = dir * step;

    const VectorXc k2 = f(t + c2 * hs, y + hs * (a21 * k1));
    const VectorXc k3 = f(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
    const VectorXc k4 = f(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    const VectorXc k5 = f(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const VectorXc k6 = f(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const VectorXc y_new = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const VectorXc k7 = f(t + hs, y_new);
    const VectorXc err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err_norm = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y(i)), std::abs(y_new(i)));
      const double e = std::abs(err(i)) / sc;
      err_norm = std::isfinite(e) ? std::max(err_norm, e) : std::numeric_limits<double>::infinity();
    }

    if (err_norm <= 1.0) {
      t = last ? t1 : t + hs;
      y = y_new;
      k1 = k7;
      if (stats) ++stats->accepted;
      const double grow = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
      // A final step clipped to t1 says little about the natural step size.
      if (!last || step == h) h = step * grow;
    } else {
      if (stats) ++stats->rejected;
      const double shrink = std::isfinite(err_norm) ? std::max(0.1, 0.9 * std::pow(err_norm, -0.2)) : 0.1;
      h = step * shrink;
      if (h < opt.min_step)
        throw Error(ErrorCode::StepFailure, "step size underflow at t=" + std::to_string(t));
    }
  }
}

} // namespace stellar

#endif // STELLAR_ODE_HPP
