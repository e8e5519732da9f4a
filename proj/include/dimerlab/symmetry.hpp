#pragma once

#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "dimerlab/lattice.hpp"
#include "dimerlab/sector_basis.hpp"

namespace dimerlab {

/// One irreducible sector of the abelian group generated by the lattice
/// reflections and, at half filling, the global excitation flip.
///
/// `isometry` has orthonormal real columns spanning the sector inside the
/// full basis, so a complex-symmetric H stays complex symmetric under P^T H P.
struct SymmetryBlock {
  std::vector<int> characters;  // +1 / -1 per generator
  Eigen::SparseMatrix<double> isometry;

  Eigen::Index dimension() const noexcept { return isometry.cols(); }
};

struct SymmetryDecomposition {
  std::vector<std::string> generators;
  std::vector<SymmetryBlock> blocks;
};

/// Reflections are included when the lattice extends along that axis; the
/// flip s+ <-> s- only when 2 * excitations == sites.
SymmetryDecomposition symmetry_blocks(const Lattice& lattice, const SectorBasis& basis);

/// Trivial decomposition with a single identity block.
SymmetryDecomposition trivial_blocks(const SectorBasis& basis);

}  // namespace dimerlab
