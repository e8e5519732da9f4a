#include "dimerlab/sector_basis.hpp"

#include <bit>
#include <string>

#include "dimerlab/errors.hpp"

namespace dimerlab {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
  return static_cast<std::uint64_t>(r);
}

SectorBasis::SectorBasis(int sites, int excitations, std::size_t cap)
    : sites_(sites), excitations_(excitations) {
  if (sites < 1 || sites > 63) throw ValidationError("sector basis needs 1..63 sites");
  if (excitations < 0 || excitations > sites) {
    throw ValidationError("excitation count " + std::to_string(excitations) + " outside [0, " +
                          std::to_string(sites) + "]");
  }
  const std::uint64_t dim = binomial(sites, excitations);
  if (dim > cap) throw CapacityError("sector basis too large", dim, cap);

  auto table = std::make_shared<std::vector<std::vector<std::uint64_t>>>();
  table->assign(static_cast<std::size_t>(sites) + 1,
                std::vector<std::uint64_t>(static_cast<std::size_t>(excitations) + 2, 0));
  for (int n = 0; n <= sites; ++n) {
    for (int k = 0; k <= excitations + 1; ++k) (*table)[n][k] = binomial(n, k);
  }
  binom_ = std::move(table);

  // Gosper's hack walks fixed-popcount words in ascending order.
  auto words = std::make_shared<std::vector<std::uint64_t>>();
  words->reserve(dim);
  if (excitations == 0) {
    words->push_back(0);
  } else {
    std::uint64_t w = (std::uint64_t{1} << excitations) - 1;
    const std::uint64_t limit = std::uint64_t{1} << sites;
    while (w < limit) {
      words->push_back(w);
      const std::uint64_t c = w & (~w + 1);
      const std::uint64_t r = w + c;
      w = (((r ^ w) >> 2) / c) | r;
    }
  }
  configs_ = std::move(words);
}

bool SectorBasis::contains(std::uint64_t word) const noexcept {
  return std::popcount(word) == excitations_ && (word >> sites_) == 0;
}

std::size_t SectorBasis::rank(std::uint64_t word) const {
  if (!contains(word)) throw DomainError("occupation word outside the sector");
  // Colex rank of the set bits; equals the position in ascending order.
  std::uint64_t r = 0;
  int k = 1;
  while (word != 0) {
    const int pos = std::countr_zero(word);
    r += (*binom_)[static_cast<std::size_t>(pos)][static_cast<std::size_t>(k)];
    word &= word - 1;
    ++k;
  }
  return static_cast<std::size_t>(r);
}

}  // namespace dimerlab
