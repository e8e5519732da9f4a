#include "dimerlab/symmetry.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <map>

namespace dimerlab {
namespace {

using WordMap = std::function<std::uint64_t(std::uint64_t)>;

WordMap permutation_map(std::vector<int> perm) {
  return [perm = std::move(perm)](std::uint64_t w) {
    std::uint64_t out = 0;
    for (std::size_t s = 0; s < perm.size(); ++s) {
      if ((w >> s) & 1U) out |= std::uint64_t{1} << perm[s];
    }
    return out;
  };
}

}  // namespace

SymmetryDecomposition trivial_blocks(const SectorBasis& basis) {
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  Eigen::SparseMatrix<double> id(dim, dim);
  id.setIdentity();
  return {{}, {SymmetryBlock{{}, std::move(id)}}};
}

SymmetryDecomposition symmetry_blocks(const Lattice& lattice, const SectorBasis& basis) {
  SymmetryDecomposition out;
  std::vector<WordMap> gens;
  if (lattice.nx() > 1) {
    out.generators.emplace_back("mirror_x");
    gens.push_back(permutation_map(lattice.mirror_x()));
  }
  if (lattice.ny() > 1) {
    out.generators.emplace_back("mirror_y");
    gens.push_back(permutation_map(lattice.mirror_y()));
  }
  if (2 * basis.excitations() == basis.sites()) {
    const std::uint64_t mask = (std::uint64_t{1} << basis.sites()) - 1;
    out.generators.emplace_back("flip");
    gens.emplace_back([mask](std::uint64_t w) { return ~w & mask; });
  }
  if (gens.empty()) return trivial_blocks(basis);

  const std::size_t k = gens.size();
  const std::size_t order = std::size_t{1} << k;
  const std::size_t dim = basis.dimension();

  // Images of a word under every group element e (bit g of e = apply generator g).
  auto images = [&](std::uint64_t w) {
    std::vector<std::uint64_t> img(order);
    for (std::size_t e = 0; e < order; ++e) {
      std::uint64_t x = w;
      for (std::size_t g = 0; g < k; ++g) {
        if ((e >> g) & 1U) x = gens[g](x);
      }
      img[e] = x;
    }
    return img;
  };

  std::vector<std::vector<Eigen::Triplet<double>>> entries(order);
  std::vector<Eigen::Index> columns(order, 0);
  std::vector<char> seen(dim, 0);

  for (std::size_t idx = 0; idx < dim; ++idx) {
    if (seen[idx]) continue;
    const auto img = images(basis.config(idx));
    std::vector<std::size_t> ranks(order);
    for (std::size_t e = 0; e < order; ++e) {
      ranks[e] = basis.rank(img[e]);
      seen[ranks[e]] = 1;
    }
    for (std::size_t chi = 0; chi < order; ++chi) {
      std::map<std::size_t, double> vec;
      for (std::size_t e = 0; e < order; ++e) {
        const int sign = (std::popcount(chi & e) % 2 == 0) ? 1 : -1;
        vec[ranks[e]] += sign;
      }
      double norm2 = 0.0;
      for (auto& [r, v] : vec) norm2 += v * v;
      if (norm2 < 0.5) continue;
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& [r, v] : vec) {
        if (v != 0.0) entries[chi].emplace_back(static_cast<int>(r), static_cast<int>(columns[chi]), v * inv);
      }
      ++columns[chi];
    }
  }

  for (std::size_t chi = 0; chi < order; ++chi) {
    if (columns[chi] == 0) continue;
    SymmetryBlock block;
    for (std::size_t g = 0; g < k; ++g) block.characters.push_back(((chi >> g) & 1U) ? -1 : 1);
    block.isometry.resize(static_cast<Eigen::Index>(dim), columns[chi]);
    block.isometry.setFromTriplets(entries[chi].begin(), entries[chi].end());
    block.isometry.makeCompressed();
    out.blocks.push_back(std::move(block));
  }
  return out;
}

}  // namespace dimerlab
