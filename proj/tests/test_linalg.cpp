#include <doctest.h>

#include <cmath>
#include <random>

#include "pmjc/errors.hpp"
#include "pmjc/linalg.hpp"

using namespace pmjc;

namespace {

Matrix random_hermitian(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = {u(rng), u(rng)};
  return 0.5 * (a + a.adjoint());
}

}  // namespace

TEST_CASE("Jacobi diagonalizes random Hermitian matrices") {
  for (int n : {1, 2, 5, 24}) {
    const Matrix a = random_hermitian(n, 100 + n);
    const HermitianEigen e = jacobi_eigen(a);
    const Matrix v = e.vectors;
    CHECK(max_abs(v.adjoint() * v - Matrix::Identity(n, n)) <= 1e-13);
    CHECK(max_abs(a * v - v * e.values.cast<std::complex<double>>().asDiagonal()) <= 1e-12);
    for (int i = 1; i < n; ++i) CHECK(e.values(i) >= e.values(i - 1));
    const Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Matrix>(a).eigenvalues();
    CHECK((e.values - ref).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("Jacobi input checks") {
  Matrix a = random_hermitian(4, 9);
  a(0, 1) += 0.5;
  CHECK_THROWS_AS(jacobi_eigen(a), std::invalid_argument);
  CHECK_THROWS_AS(jacobi_eigen(Matrix(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(jacobi_eigen(random_hermitian(12, 4), 1e-300, 1), NumericalError);
}

TEST_CASE("expm agrees with the spectral exponential") {
  for (double scale : {0.1, 1.0, 8.0}) {
    const Matrix a = scale * random_hermitian(16, 5);
    const HermitianEigen e = jacobi_eigen(a);
    const Matrix ref = e.vectors * e.values.array().exp().matrix().cast<std::complex<double>>().asDiagonal() *
                       e.vectors.adjoint();
    CHECK(max_abs(expm(a) - ref) <= 1e-12 * max_abs(ref));
  }
  const Matrix zero = Matrix::Zero(3, 3);
  CHECK(max_abs(expm(zero) - Matrix::Identity(3, 3)) <= 1e-15);
  Matrix nil = Matrix::Zero(2, 2);
  nil(0, 1) = 3.0;
  const Matrix en = expm(nil);
  CHECK(std::abs(en(0, 1) - 3.0) <= 1e-15);
  CHECK(std::abs(en(0, 0) - 1.0) <= 1e-15);
  const Matrix h = random_hermitian(10, 6);
  CHECK(max_abs(expm(h) * expm(-h) - Matrix::Identity(10, 10)) <= 1e-12);
}
