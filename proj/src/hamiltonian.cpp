#include "dimerlab/hamiltonian.hpp"

#include <string>
#include <vector>

#include "dimerlab/errors.hpp"

namespace dimerlab {

cplx EffectiveHamiltonian::trace() const {
  cplx t{0.0, 0.0};
  for (Eigen::Index k = 0; k < matrix.outerSize(); ++k) t += matrix.coeff(k, k);
  return t;
}

Eigen::MatrixXcd EffectiveHamiltonian::to_dense(std::size_t cap) const {
  if (dimension() > cap) throw CapacityError("dense sector matrix", dimension(), cap);
  return Eigen::MatrixXcd(matrix);
}

EffectiveHamiltonian assemble_hamiltonian(const Eigen::MatrixXcd& coupling,
                                          const SectorBasis& basis, bool hermitian) {
  const int n = basis.sites();
  if (coupling.rows() != n || coupling.cols() != n) {
    throw ValidationError("coupling matrix size does not match the basis");
  }
  const std::size_t dim = basis.dimension();
  const auto holes = static_cast<std::size_t>(n - basis.excitations());
  std::vector<Eigen::Triplet<cplx, std::int64_t>> entries;
  entries.reserve(dim * (1 + static_cast<std::size_t>(basis.excitations()) * holes));

  for (std::size_t col = 0; col < dim; ++col) {
    const std::uint64_t c = basis.config(col);
    cplx diag{0.0, 0.0};
    for (int j = 0; j < n; ++j) {
      if (((c >> j) & 1U) == 0) continue;
      diag += coupling(j, j);
      for (int i = 0; i < n; ++i) {
        if ((c >> i) & 1U) continue;
        const std::uint64_t moved = c ^ (std::uint64_t{1} << j) ^ (std::uint64_t{1} << i);
        entries.emplace_back(static_cast<std::int64_t>(basis.rank(moved)),
                             static_cast<std::int64_t>(col), coupling(i, j));
      }
    }
    if (diag != cplx{0.0, 0.0}) {
      entries.emplace_back(static_cast<std::int64_t>(col), static_cast<std::int64_t>(col), diag);
    }
  }

  EffectiveHamiltonian h{basis, SparseMatrixXcd(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim)),
                         hermitian, std::nullopt};
  h.matrix.setFromTriplets(entries.begin(), entries.end());
  h.matrix.makeCompressed();
  return h;
}

EffectiveHamiltonian assemble_hamiltonian(const Lattice& lattice, const GreensModel& model,
                                          const SectorBasis& basis) {
  if (lattice.size() != basis.sites()) {
    throw ValidationError("lattice has " + std::to_string(lattice.size()) +
                          " sites but basis has " + std::to_string(basis.sites()));
  }
  auto h = assemble_hamiltonian(coupling_matrix(lattice, model), basis, !model.dissipative());
  h.lattice = lattice;
  return h;
}

Eigen::MatrixXd dissipation_matrix(const Lattice& lattice, const GreensModel& model) {
  if (!model.dissipative()) {
    throw UnsupportedError("dissipation matrix is undefined for the band-gap kernel");
  }
  return -coupling_matrix(lattice, model).imag();
}

}  // namespace dimerlab
