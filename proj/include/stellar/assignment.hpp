#ifndef STELLAR_ASSIGNMENT_HPP
#define STELLAR_ASSIGNMENT_HPP

#include <algorithm>
#include <complex>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "stellar/ladder.hpp"

namespace stellar {

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method,
/// potentials form). Returns col_of_row.
inline std::vector<int> hungarian(const Eigen::MatrixXd& cost)
{
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> col_of_row(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) col_of_row[p[j] - 1] = j - 1;
  return col_of_row;
}

/// Permutation perm with to[perm[k]] closest to from[k] in the sum-of-distances sense.
inline std::vector<int> match_points(std::span<const cplx> from, std::span<const cplx> to)
{
  const auto n = static_cast<Eigen::Index>(from.size());
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = std::abs(from[i] - to[j]);
  return hungarian(cost);
}

/// Largest pair distance under the optimal matching; 0 for empty sets.
inline double matching_distance(std::span<const cplx> a, std::span<const cplx> b)
{
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  if (a.empty()) return 0.0;
  const std::vector<int> perm = match_points(a, b);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    worst = std::max(worst, std::abs(a[k] - b[static_cast<std::size_t>(perm[k])]));
  return worst;
}

} // namespace stellar

#endif // STELLAR_ASSIGNMENT_HPP
