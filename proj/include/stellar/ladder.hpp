#ifndef STELLAR_LADDER_HPP
#define STELLAR_LADDER_HPP

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace stellar {

using cplx = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

/// Annihilation operator truncated to the first `dim` number states.
inline MatrixXc annihilation(Eigen::Index dim)
{
  MatrixXc a = MatrixXc::Zero(dim, dim);
  for (Eigen::Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline MatrixXc creation(Eigen::Index dim) { return annihilation(dim).adjoint(); }

/// x = (a + a^dag)/sqrt(2)
inline MatrixXc position_operator(Eigen::Index dim)
{
  const MatrixXc a = annihilation(dim);
  return (a + a.adjoint()) / std::sqrt(2.0);
}

/// p = (a - a^dag)/(i sqrt(2))
inline MatrixXc momentum_operator(Eigen::Index dim)
{
  const MatrixXc a = annihilation(dim);
  return (a - a.adjoint()) / cplx(0.0, std::sqrt(2.0));
}

} // namespace stellar

#endif // STELLAR_LADDER_HPP
