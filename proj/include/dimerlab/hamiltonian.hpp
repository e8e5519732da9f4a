#pragma once

#include <optional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dimerlab/greens.hpp"
#include "dimerlab/lattice.hpp"
#include "dimerlab/sector_basis.hpp"

namespace dimerlab {

using SparseMatrixXcd = Eigen::SparseMatrix<cplx, Eigen::ColMajor, std::int64_t>;

/// Sector-restricted H = sum_ij G_ij s+_i s-_j (hard-core bosons, no fermionic signs).
struct EffectiveHamiltonian {
  SectorBasis basis;
  SparseMatrixXcd matrix;
  bool hermitian = false;
  /// Geometry the matrix was built from; enables symmetry-blocked solvers.
  std::optional<Lattice> lattice;

  std::size_t dimension() const noexcept { return basis.dimension(); }
  /// Frobenius norm of the sector matrix.
  double norm() const { return matrix.norm(); }
  cplx trace() const;
  Eigen::MatrixXcd to_dense(std::size_t cap = 4096) const;
};

EffectiveHamiltonian assemble_hamiltonian(const Lattice& lattice, const GreensModel& model,
                                          const SectorBasis& basis);

/// Same as above from a precomputed coupling matrix.
EffectiveHamiltonian assemble_hamiltonian(const Eigen::MatrixXcd& coupling,
                                          const SectorBasis& basis, bool hermitian);

/// Real symmetric Gamma_ij = -Im G_ij for the radiative kernels.
Eigen::MatrixXd dissipation_matrix(const Lattice& lattice, const GreensModel& model);

}  // namespace dimerlab
