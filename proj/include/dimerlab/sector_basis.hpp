#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace dimerlab {

inline constexpr std::size_t kDefaultBasisCap = 200000;

/// Fixed-excitation sector of N two-level atoms.
///
/// Configurations are N-bit occupation words (bit i set = atom i excited)
/// with exactly `excitations()` set bits, listed in ascending integer order.
/// Copies share the configuration table.
class SectorBasis {
 public:
  SectorBasis(int sites, int excitations, std::size_t cap = kDefaultBasisCap);

  int sites() const noexcept { return sites_; }
  int excitations() const noexcept { return excitations_; }
  std::size_t dimension() const noexcept { return configs_->size(); }

  std::span<const std::uint64_t> configs() const noexcept { return *configs_; }
  std::uint64_t config(std::size_t k) const { return (*configs_)[k]; }

  /// Index of `word` in the basis; throws DomainError for words outside the sector.
  std::size_t rank(std::uint64_t word) const;
  bool contains(std::uint64_t word) const noexcept;

  friend bool operator==(const SectorBasis& a, const SectorBasis& b) noexcept {
    return a.sites_ == b.sites_ && a.excitations_ == b.excitations_;
  }

 private:
  int sites_;
  int excitations_;
  std::shared_ptr<const std::vector<std::uint64_t>> configs_;
  // binom_[n][k] = C(n, k) for the colex rank.
  std::shared_ptr<const std::vector<std::vector<std::uint64_t>>> binom_;
};

std::uint64_t binomial(int n, int k);

}  // namespace dimerlab
