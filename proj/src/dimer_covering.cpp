#include "dimerlab/dimer_covering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <set>

#include "dimerlab/errors.hpp"

namespace dimerlab {
namespace {

using Partners = std::vector<int>;

void require_even(const Lattice& lattice) {
  if (lattice.size() % 2 != 0) {
    throw DomainError("lattice with " + std::to_string(lattice.size()) +
                      " sites has no perfect matching");
  }
}

Partners to_partners(const Lattice& lattice, const DimerCovering& c) {
  Partners p(static_cast<std::size_t>(lattice.size()), -1);
  for (auto [a, b] : c.pairs) {
    p[static_cast<std::size_t>(a)] = b;
    p[static_cast<std::size_t>(b)] = a;
  }
  return p;
}

DimerCovering from_partners(const Lattice& lattice, const Partners& p) {
  std::vector<Bond> pairs;
  for (int s = 0; s < lattice.size(); ++s) {
    const int t = p[static_cast<std::size_t>(s)];
    if (s < t) pairs.emplace_back(s, t);
  }
  return canonical_covering(lattice, std::move(pairs));
}

std::uint64_t count_from(const Lattice& lattice, std::uint64_t used) {
  const int n = lattice.size();
  const std::uint64_t full = (n == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  if (used == full) return 1;
  const int i = std::countr_one(used);
  std::uint64_t total = 0;
  const int x = lattice.ix(i);
  const int y = lattice.iy(i);
  // Lower-index neighbours are already matched, so only +x and +y remain.
  if (x + 1 < lattice.nx()) {
    const int j = lattice.index(x + 1, y);
    if (((used >> j) & 1U) == 0) total += count_from(lattice, used | (std::uint64_t{1} << i) | (std::uint64_t{1} << j));
  }
  if (y + 1 < lattice.ny()) {
    const int j = lattice.index(x, y + 1);
    if (((used >> j) & 1U) == 0) total += count_from(lattice, used | (std::uint64_t{1} << i) | (std::uint64_t{1} << j));
  }
  return total;
}

}  // namespace

DimerCovering canonical_covering(const Lattice& lattice, std::vector<Bond> pairs) {
  for (auto& [a, b] : pairs) {
    if (!lattice.on_sublattice_a(a)) std::swap(a, b);
  }
  std::sort(pairs.begin(), pairs.end());
  return DimerCovering{std::move(pairs)};
}

bool is_valid_covering(const Lattice& lattice, const DimerCovering& covering) {
  const int n = lattice.size();
  if (static_cast<int>(covering.pairs.size()) * 2 != n) return false;
  std::vector<char> hit(static_cast<std::size_t>(n), 0);
  for (auto [a, b] : covering.pairs) {
    if (a < 0 || b < 0 || a >= n || b >= n) return false;
    if (!lattice.are_neighbors(a, b) || !lattice.on_sublattice_a(a)) return false;
    if (hit[static_cast<std::size_t>(a)]++ || hit[static_cast<std::size_t>(b)]++) return false;
  }
  return std::is_sorted(covering.pairs.begin(), covering.pairs.end());
}

DimerCovering columnar_covering(const Lattice& lattice) {
  require_even(lattice);
  std::vector<Bond> pairs;
  if (lattice.nx() % 2 == 0) {
    for (int y = 0; y < lattice.ny(); ++y) {
      for (int x = 0; x < lattice.nx(); x += 2) pairs.emplace_back(lattice.index(x, y), lattice.index(x + 1, y));
    }
  } else {
    for (int x = 0; x < lattice.nx(); ++x) {
      for (int y = 0; y < lattice.ny(); y += 2) pairs.emplace_back(lattice.index(x, y), lattice.index(x, y + 1));
    }
  }
  return canonical_covering(lattice, std::move(pairs));
}

DimerCoveringSet enumerate_coverings(const Lattice& lattice) {
  require_even(lattice);
  const Partners seed = to_partners(lattice, columnar_covering(lattice));
  std::set<Partners> visited{seed};
  std::deque<Partners> frontier{seed};

  while (!frontier.empty()) {
    const Partners p = std::move(frontier.front());
    frontier.pop_front();
    for (int y = 0; y + 1 < lattice.ny(); ++y) {
      for (int x = 0; x + 1 < lattice.nx(); ++x) {
        const int s00 = lattice.index(x, y);
        const int s10 = lattice.index(x + 1, y);
        const int s01 = lattice.index(x, y + 1);
        const int s11 = lattice.index(x + 1, y + 1);
        auto at = [&](int s) { return p[static_cast<std::size_t>(s)]; };
        Partners q = p;
        auto set = [&](int a, int b) {
          q[static_cast<std::size_t>(a)] = b;
          q[static_cast<std::size_t>(b)] = a;
        };
        if (at(s00) == s10 && at(s01) == s11) {
          set(s00, s01);
          set(s10, s11);
        } else if (at(s00) == s01 && at(s10) == s11) {
          set(s00, s10);
          set(s01, s11);
        } else {
          continue;
        }
        if (visited.insert(q).second) frontier.push_back(std::move(q));
      }
    }
  }

  DimerCoveringSet out{lattice, {}};
  out.coverings.reserve(visited.size());
  for (const auto& p : visited) out.coverings.push_back(from_partners(lattice, p));
  std::sort(out.coverings.begin(), out.coverings.end());
  return out;
}

std::uint64_t count_matchings_oracle(const Lattice& lattice) {
  if (lattice.size() > kMatchingOracleCap) {
    throw CapacityError("matching oracle", static_cast<std::size_t>(lattice.size()),
                        static_cast<std::size_t>(kMatchingOracleCap));
  }
  if (lattice.size() % 2 != 0) return 0;
  return count_from(lattice, 0);
}

namespace {

void accumulate_covering(const DimerCovering& covering, const SectorBasis& basis,
                         Eigen::VectorXcd& amplitudes) {
  const std::size_t m = covering.pairs.size();
  const double weight = std::pow(2.0, -0.5 * static_cast<double>(m));
  for (std::uint64_t choice = 0; choice < (std::uint64_t{1} << m); ++choice) {
    std::uint64_t word = 0;
    for (std::size_t d = 0; d < m; ++d) {
      const auto [a, b] = covering.pairs[d];
      word |= std::uint64_t{1} << (((choice >> d) & 1U) ? b : a);
    }
    const double sign = (std::popcount(choice) % 2 == 0) ? 1.0 : -1.0;
    amplitudes[static_cast<Eigen::Index>(basis.rank(word))] += sign * weight;
  }
}

void check_sector(const SectorBasis& basis, int sites, std::size_t dimers) {
  if (basis.sites() != sites || static_cast<std::size_t>(basis.excitations()) != dimers ||
      2 * dimers != static_cast<std::size_t>(sites)) {
    throw ValidationError("dimer states need the half-filled sector of the covering's lattice");
  }
}

}  // namespace

StateVector dimer_product_state(const DimerCovering& covering, const SectorBasis& basis) {
  int sites = 0;
  for (auto [a, b] : covering.pairs) sites = std::max({sites, a + 1, b + 1});
  if (basis.sites() < sites) throw ValidationError("covering does not fit the basis");
  check_sector(basis, basis.sites(), covering.pairs.size());
  StateVector psi(basis, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.dimension())));
  accumulate_covering(covering, basis, psi.amplitudes);
  return psi;
}

StateVector rvb_state(const DimerCoveringSet& set, const SectorBasis& basis) {
  if (set.coverings.empty()) throw ValidationError("empty covering set");
  check_sector(basis, set.lattice.size(), set.coverings.front().pairs.size());
  StateVector psi(basis, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.dimension())));
  for (const auto& c : set.coverings) accumulate_covering(c, basis, psi.amplitudes);
  psi.normalize();
  psi.canonicalize_phase();
  return psi;
}

void to_json(nlohmann::json& j, const DimerCovering& covering) {
  j = nlohmann::json::array();
  for (auto [a, b] : covering.pairs) j.push_back({a, b});
}

void to_json(nlohmann::json& j, const DimerCoveringSet& set) {
  j = nlohmann::json{{"lattice", {{"nx", set.lattice.nx()}, {"ny", set.lattice.ny()}}},
                     {"count", set.coverings.size()},
                     {"coverings", set.coverings}};
}

}  // namespace dimerlab
