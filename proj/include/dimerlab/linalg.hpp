#pragma once

#include <Eigen/Dense>

#include "dimerlab/greens.hpp"

// Thin wrappers over LAPACK drivers used by the spectral and dynamics code.
// Inputs are taken by value because LAPACK overwrites them.
namespace dimerlab::linalg {

/// Eigenvalues of a general complex matrix (zgeev, no vectors).
Eigen::VectorXcd eigenvalues(Eigen::MatrixXcd a);

/// Eigenvalues and unit-norm right eigenvectors (zgeev).
void eigensystem(Eigen::MatrixXcd a, Eigen::VectorXcd& values, Eigen::MatrixXcd& vectors);

/// Full Hermitian eigendecomposition, ascending (zheevd).
void hermitian_eigensystem(Eigen::MatrixXcd a, Eigen::VectorXd& values, Eigen::MatrixXcd& vectors);

/// Lowest `count` Hermitian eigenpairs (zheevr).
void hermitian_lowest(Eigen::MatrixXcd a, int count, Eigen::VectorXd& values,
                      Eigen::MatrixXcd& vectors);

/// Smallest eigenvalue of a real symmetric matrix (dsyevr).
double symmetric_smallest(Eigen::MatrixXd a);

/// Unit right eigenvector for an (approximate) eigenvalue by inverse iteration.
/// `start`, when nonempty, seeds the iteration (e.g. a reference state).
Eigen::VectorXcd inverse_iteration(const Eigen::MatrixXcd& a, cplx lambda,
                                   const Eigen::VectorXcd& start = {}, int sweeps = 3);

/// Solves A X - X B^H = C for upper-triangular A, B (ztrsyl).
Eigen::MatrixXcd triangular_sylvester(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                      Eigen::MatrixXcd c);

}  // namespace dimerlab::linalg
