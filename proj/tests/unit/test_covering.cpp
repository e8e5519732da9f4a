#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "dimerlab/dimer_covering.hpp"
#include "dimerlab/errors.hpp"
#include "dimerlab/lattice.hpp"

using namespace dimerlab;

namespace {

Lattice shape(int nx, int ny) { return ny == 1 ? Lattice::chain(nx, 0.1) : Lattice::square(nx, ny, 0.1); }

// Brute force over all N/2-subsets of bonds; independent of the library's
// recursive oracle and of the plaquette-flip enumeration.
std::set<std::vector<Bond>> all_matchings(const Lattice& lat) {
  const auto& bonds = lat.bonds();
  const std::size_t m = bonds.size();
  const std::size_t k = static_cast<std::size_t>(lat.size()) / 2;
  std::set<std::vector<Bond>> out;
  if (k > m) return out;
  std::vector<char> pick(m, 0);
  std::fill(pick.end() - static_cast<std::ptrdiff_t>(k), pick.end(), 1);
  do {
    std::uint64_t used = 0;
    bool ok = true;
    std::vector<Bond> chosen;
    for (std::size_t b = 0; b < m && ok; ++b) {
      if (!pick[b]) continue;
      const auto [i, j] = bonds[b];
      const std::uint64_t mask = (std::uint64_t{1} << i) | (std::uint64_t{1} << j);
      ok = (used & mask) == 0;
      used |= mask;
      chosen.push_back(lat.on_sublattice_a(i) ? Bond{i, j} : Bond{j, i});
    }
    if (ok) {
      std::sort(chosen.begin(), chosen.end());
      out.insert(chosen);
    }
  } while (std::next_permutation(pick.begin(), pick.end()));
  return out;
}

}  // namespace

TEST_CASE("enumeration matches brute force, covering by covering") {
  for (auto [nx, ny] : {std::pair{4, 1}, {6, 1}, {2, 2}, {2, 3}, {2, 5}, {4, 2}, {3, 4}, {4, 4}}) {
    CAPTURE(nx);
    CAPTURE(ny);
    const Lattice lat = shape(nx, ny);
    const auto set = enumerate_coverings(lat);
    const auto brute = all_matchings(lat);
    REQUIRE(set.size() == brute.size());
    std::set<std::vector<Bond>> mine;
    for (const auto& c : set.coverings) {
      CHECK(is_valid_covering(lat, c));
      mine.insert(c.pairs);
    }
    CHECK(mine == brute);
    CHECK(count_matchings_oracle(lat) == brute.size());
  }
}

TEST_CASE("known counts") {
  for (int n = 4; n <= 12; n += 2) CHECK(enumerate_coverings(shape(n, 1)).size() == 1);
  const std::size_t fib[] = {2, 3, 5, 8, 13, 21, 34};
  for (int ny = 2; ny <= 8; ++ny) CHECK(enumerate_coverings(shape(2, ny)).size() == fib[ny - 2]);
  CHECK(enumerate_coverings(shape(4, 2)).size() == 5);
  CHECK(enumerate_coverings(shape(4, 4)).size() == 36);
  // 6 x 6 has 6728 domino tilings.
  CHECK(count_matchings_oracle(shape(6, 6)) == 6728);
  CHECK(enumerate_coverings(shape(6, 6)).size() == 6728);
}

TEST_CASE("odd lattices and oracle cap") {
  CHECK_THROWS_AS(enumerate_coverings(shape(3, 3)), DomainError);
  CHECK(count_matchings_oracle(shape(3, 3)) == 0);
  CHECK_THROWS_AS(count_matchings_oracle(shape(2, 20)), CapacityError);
}

TEST_CASE("canonical orientation and validity") {
  const Lattice lat = shape(2, 2);
  const auto c = canonical_covering(lat, {{3, 1}, {2, 0}});
  CHECK(c.pairs == std::vector<Bond>{{0, 2}, {3, 1}});
  CHECK(is_valid_covering(lat, c));
  CHECK_FALSE(is_valid_covering(lat, DimerCovering{{{0, 3}, {1, 2}}}));   // diagonal pairs
  CHECK_FALSE(is_valid_covering(lat, DimerCovering{{{0, 1}}}));           // not perfect
  CHECK(columnar_covering(shape(3, 2)).pairs.size() == 3);
}

TEST_CASE("dimer product and RVB states") {
  const Lattice lat = shape(2, 2);
  const SectorBasis basis(4, 2);
  const auto set = enumerate_coverings(lat);
  // Horizontal covering (0,1),(3,2): (s+_0 - s+_1)(s+_3 - s+_2)|0>/2.
  const DimerCovering horizontal = canonical_covering(lat, {{0, 1}, {2, 3}});
  const StateVector h = dimer_product_state(horizontal, basis);
  CHECK(h.norm() == doctest::Approx(1.0));
  CHECK(h.amplitudes[basis.rank(0b1001)].real() == doctest::Approx(0.5));   // 0 and 3
  CHECK(h.amplitudes[basis.rank(0b0101)].real() == doctest::Approx(-0.5));  // 0 and 2
  CHECK(h.amplitudes[basis.rank(0b1010)].real() == doctest::Approx(-0.5));  // 1 and 3
  CHECK(h.amplitudes[basis.rank(0b0110)].real() == doctest::Approx(0.5));   // 1 and 2
  CHECK(std::abs(h.amplitudes[basis.rank(0b0011)]) < 1e-15);

  const StateVector rvb = rvb_state(set, basis);
  CHECK(rvb.norm() == doctest::Approx(1.0));
  // The two coverings of a plaquette share the diagonal configurations, which add up.
  CHECK(std::abs(rvb.amplitudes[basis.rank(0b1001)]) > std::abs(rvb.amplitudes[basis.rank(0b0101)]));
  CHECK(rvb.amplitudes.imag().norm() == 0.0);
}

TEST_CASE("covering JSON") {
  nlohmann::json j = enumerate_coverings(shape(2, 3));
  CHECK(j["coverings"].size() == 3);
}
