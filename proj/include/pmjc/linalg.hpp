#pragma once

// Dense complex matrix kernels: cyclic Jacobi for Hermitian matrices and a
// scaling-and-squaring matrix exponential.

#include <Eigen/Dense>

namespace pmjc {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct HermitianEigen {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // column j belongs to values[j]
  int sweeps = 0;
};

/// Cyclic complex Jacobi. Stops when the off-diagonal Frobenius norm falls
/// below `tol` times the full Frobenius norm; throws NumericalError after
/// `max_sweeps` sweeps, std::invalid_argument for a non-Hermitian input.
HermitianEigen jacobi_eigen(const Matrix& a, double tol = 1e-14, int max_sweeps = 100);

/// exp(a) by scaling and squaring with the [13/13] Pade approximant
/// (Higham 2005 coefficients and theta_13).
Matrix expm(const Matrix& a);

double max_abs(const Matrix& a);

/// max |a - a^dagger|.
double hermiticity_residual(const Matrix& a);

}  // namespace pmjc
