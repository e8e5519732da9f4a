#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "dimerlab/lattice.hpp"
#include "dimerlab/sector_basis.hpp"
#include "dimerlab/state.hpp"

namespace dimerlab {

/// Perfect matching of nearest-neighbour bonds. Each pair is stored as
/// (site on sublattice A, site on sublattice B) and pairs are sorted by the
/// A site, which makes the representation canonical.
struct DimerCovering {
  std::vector<Bond> pairs;

  friend bool operator==(const DimerCovering&, const DimerCovering&) = default;
  friend auto operator<=>(const DimerCovering&, const DimerCovering&) = default;
};

struct DimerCoveringSet {
  Lattice lattice;
  std::vector<DimerCovering> coverings;

  std::size_t size() const noexcept { return coverings.size(); }
};

inline constexpr int kMatchingOracleCap = 36;

/// Orient a set of nearest-neighbour pairs A -> B and sort it.
DimerCovering canonical_covering(const Lattice& lattice, std::vector<Bond> pairs);

/// True iff `covering` is a perfect matching of nearest-neighbour bonds in canonical form.
bool is_valid_covering(const Lattice& lattice, const DimerCovering& covering);

/// Columnar seed: horizontal dimers, or vertical ones when nx is odd.
DimerCovering columnar_covering(const Lattice& lattice);

/// All coverings reachable from the columnar seed by plaquette flips, sorted.
DimerCoveringSet enumerate_coverings(const Lattice& lattice);

/// Number of perfect matchings of the nearest-neighbour graph by plain
/// recursion on the lowest unmatched site. Exponential; N <= 36.
std::uint64_t count_matchings_oracle(const Lattice& lattice);

/// prod_(a,b) (s+_a - s+_b)/sqrt(2) |0> expanded over the half-filled sector.
StateVector dimer_product_state(const DimerCovering& covering, const SectorBasis& basis);

/// Normalised equal-weight superposition of all covering states.
StateVector rvb_state(const DimerCoveringSet& set, const SectorBasis& basis);

void to_json(nlohmann::json& j, const DimerCovering& covering);
void to_json(nlohmann::json& j, const DimerCoveringSet& set);

}  // namespace dimerlab
