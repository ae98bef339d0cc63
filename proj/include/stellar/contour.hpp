#ifndef STELLAR_CONTOUR_HPP
#define STELLAR_CONTOUR_HPP

// Argument-principle zero counting on axis-aligned rectangles.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "stellar/errors.hpp"
#include "stellar/ladder.hpp"

namespace stellar {

using EntireFunction = std::function<cplx(cplx)>;

struct Box {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;

  static Box centered(double halfwidth) { return {-halfwidth, halfwidth, -halfwidth, halfwidth}; }

  bool contains(cplx z, double margin = 0.0) const
  {
    return z.real() > x_min + margin && z.real() < x_max - margin && z.imag() > y_min + margin &&
           z.imag() < y_max - margin;
  }

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
};

struct ContourOptions {
  int samples_per_edge = 32;
  double max_phase_step = std::numbers::pi / 2.0;
  double min_segment = 1e-7;     // relative to the box perimeter
  double floor_ratio = 1e-9;     // against the local median of |f|
  int median_window = 4;
};

namespace detail {

struct ContourSample {
  cplx z;
  cplx f;
};

inline void check_sample(const ContourSample& s)
{
  if (!std::isfinite(s.f.real()) || !std::isfinite(s.f.imag()))
    throw Error(ErrorCode::ZeroOnContour, "non-finite value on contour");
  if (s.f == cplx(0.0, 0.0)) throw Error(ErrorCode::ZeroOnContour, "exact zero on contour");
}

inline void refine_segment(const EntireFunction& f, const ContourSample& a, const ContourSample& b, double min_len,
                           double max_step, std::vector<ContourSample>& out, int depth)
{
  const double dphase = std::abs(std::arg(b.f / a.f));
  if (dphase < max_step) {
    out.push_back(b);
    return;
  }
  if (std::abs(b.z - a.z) < min_len || depth > 60)
    throw Error(ErrorCode::ZeroOnContour, "phase jump persists on a segment shorter than the resolution limit");
  const cplx zm = 0.5 * (a.z + b.z);
  const ContourSample m{zm, f(zm)};
  check_sample(m);
  refine_segment(f, a, m, min_len, max_step, out, depth + 1);
  refine_segment(f, m, b, min_len, max_step, out, depth + 1);
}

} // namespace detail

/// Winding number of f around the counter-clockwise boundary of `box`.
inline int count_zeros_box(const EntireFunction& f, const Box& box, const ContourOptions& opt = {})
{
  if (!(box.width() > 0.0) || !(box.height() > 0.0))
    throw Error(ErrorCode::InvalidParameter, "box must have positive width and height");
  if (opt.samples_per_edge < 2) throw Error(ErrorCode::InvalidParameter, "need at least two samples per edge");

  const cplx corners[4] = {{box.x_min, box.y_min}, {box.x_max, box.y_min}, {box.x_max, box.y_max},
                           {box.x_min, box.y_max}};
  const double perimeter = 2.0 * (box.width() + box.height());
  const double min_len = opt.min_segment * perimeter;

  std::vector<detail::ContourSample> path;
  detail::ContourSample first{corners[0], f(corners[0])};
  detail::check_sample(first);
  path.push_back(first);
  for (int e = 0; e < 4; ++e) {
    const cplx a = corners[e];
    const cplx b = corners[(e + 1) % 4];
    for (int i = 1; i <= opt.samples_per_edge; ++i) {
      const cplx z = (i == opt.samples_per_edge) ? b : a + (b - a) * (static_cast<double>(i) / opt.samples_per_edge);
      detail::ContourSample s{z, (i == opt.samples_per_edge && e == 3) ? first.f : f(z)};
      detail::check_sample(s);
      const detail::ContourSample prev = path.back();
      detail::refine_segment(f, prev, s, min_len, opt.max_phase_step, path, 0);
    }
  }

  // Near-zero detection against the local magnitude: the Gaussian factor spans
  // many decades along the boundary, so a global median would misfire.
  const std::size_t n = path.size() - 1; // last sample repeats the first
  const int w = opt.median_window;
  std::vector<double> window;
  for (std::size_t i = 0; i < n; ++i) {
    window.clear();
    for (int d = -w; d <= w; ++d) {
      const std::size_t j = (i + n + static_cast<std::size_t>(d + static_cast<int>(n))) % n;
      window.push_back(std::abs(path[j].f));
    }
    std::nth_element(window.begin(), window.begin() + w, window.end());
    if (std::abs(path[i].f) < opt.floor_ratio * window[static_cast<std::size_t>(w)])
      throw Error(ErrorCode::ZeroOnContour, "|f| dips below the local floor near z=(" +
                                                std::to_string(path[i].z.real()) + "," +
                                                std::to_string(path[i].z.imag()) + ")");
  }

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) total += std::arg(path[i + 1].f / path[i].f);
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

inline int count_zeros_box(const EntireFunction& f, const Box& box, int samples_per_edge)
{
  ContourOptions opt;
  opt.samples_per_edge = samples_per_edge;
  return count_zeros_box(f, box, opt);
}

} // namespace stellar

#endif // STELLAR_CONTOUR_HPP
