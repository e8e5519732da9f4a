#include "dimerlab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

#include "dimerlab/errors.hpp"

namespace dimerlab {
namespace {

constexpr double kPsdTolerance = 1e-8;

void validate_subset(std::span<const int> subset, int sites) {
  if (subset.empty()) throw ValidationError("subset must be nonempty");
  if (subset.size() > kReducedDensityCap) {
    throw CapacityError("reduced density subset", subset.size(), kReducedDensityCap);
  }
  std::vector<int> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("duplicate site in subset");
  }
  if (sorted.front() < 0 || sorted.back() >= sites) throw ValidationError("subset site out of range");
}

std::uint64_t subset_mask(std::span<const int> subset) {
  std::uint64_t m = 0;
  for (int s : subset) m |= std::uint64_t{1} << s;
  return m;
}

std::size_t gather(std::uint64_t word, std::span<const int> subset) {
  std::size_t local = 0;
  for (std::size_t k = 0; k < subset.size(); ++k) local |= ((word >> subset[k]) & 1U) << k;
  return local;
}

std::uint64_t scatter(std::size_t local, std::span<const int> subset) {
  std::uint64_t word = 0;
  for (std::size_t k = 0; k < subset.size(); ++k) {
    if ((local >> k) & 1U) word |= std::uint64_t{1} << subset[k];
  }
  return word;
}

Eigen::Matrix4cd spin_flipped(const Eigen::Matrix4cd& rho) {
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  return yy * rho.conjugate() * yy;
}

void validate_two_qubit(const Eigen::Matrix4cd& rho) {
  if ((rho - rho.adjoint()).norm() > 1e-8) throw DomainError("two-qubit matrix is not Hermitian");
  if (std::abs(rho.trace() - cplx(1.0, 0.0)) > 1e-8) throw DomainError("two-qubit matrix trace != 1");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTolerance) {
    throw DomainError("two-qubit matrix is not positive semidefinite");
  }
}

double wootters(std::array<double, 4> lambda) {
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

}  // namespace

ReducedDensity reduced_density(const StateVector& state, std::span<const int> subset) {
  validate_subset(subset, state.basis.sites());
  const std::uint64_t mask = subset_mask(subset);
  const auto dim = Eigen::Index{1} << subset.size();

  // Group amplitudes by the configuration of the traced-out complement.
  std::map<std::uint64_t, std::vector<std::pair<std::size_t, cplx>>> groups;
  for (std::size_t k = 0; k < state.basis.dimension(); ++k) {
    const cplx a = state.amplitudes[static_cast<Eigen::Index>(k)];
    if (a == cplx{0.0, 0.0}) continue;
    const std::uint64_t c = state.basis.config(k);
    groups[c & ~mask].emplace_back(gather(c, subset), a);
  }
  ReducedDensity out{{subset.begin(), subset.end()}, Eigen::MatrixXcd::Zero(dim, dim)};
  for (const auto& [rest, entries] : groups) {
    for (const auto& [s, a] : entries) {
      for (const auto& [t, b] : entries) {
        out.matrix(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) += a * std::conj(b);
      }
    }
  }
  return out;
}

ReducedDensity reduced_density(const Eigen::MatrixXcd& rho, int sites, std::span<const int> subset) {
  validate_subset(subset, sites);
  const Eigen::Index full = Eigen::Index{1} << sites;
  if (rho.rows() != full || rho.cols() != full) {
    throw ValidationError("density matrix dimension does not match 2^sites");
  }
  const std::uint64_t mask = subset_mask(subset);
  const auto dim = Eigen::Index{1} << subset.size();
  std::vector<std::uint64_t> placed(static_cast<std::size_t>(dim));
  for (Eigen::Index t = 0; t < dim; ++t) placed[static_cast<std::size_t>(t)] = scatter(static_cast<std::size_t>(t), subset);

  ReducedDensity out{{subset.begin(), subset.end()}, Eigen::MatrixXcd::Zero(dim, dim)};
  for (Eigen::Index a = 0; a < full; ++a) {
    const auto w = static_cast<std::uint64_t>(a);
    const std::uint64_t rest = w & ~mask;
    const auto s = static_cast<Eigen::Index>(gather(w, subset));
    for (Eigen::Index t = 0; t < dim; ++t) {
      out.matrix(s, t) += rho(a, static_cast<Eigen::Index>(rest | placed[static_cast<std::size_t>(t)]));
    }
  }
  return out;
}

double spin_correlation(const StateVector& state, int i, int j) {
  const int n = state.basis.sites();
  if (i < 0 || j < 0 || i >= n || j >= n) throw ValidationError("site outside the lattice");
  if (i == j) throw ValidationError("spin correlation needs two distinct sites");
  double zz = 0.0;
  cplx hop{0.0, 0.0};  // <s+_i s-_j>
  for (std::size_t k = 0; k < state.basis.dimension(); ++k) {
    const cplx a = state.amplitudes[static_cast<Eigen::Index>(k)];
    const std::uint64_t c = state.basis.config(k);
    const int ni = static_cast<int>((c >> i) & 1U);
    const int nj = static_cast<int>((c >> j) & 1U);
    zz += std::norm(a) * (2 * ni - 1) * (2 * nj - 1);
    if (nj == 1 && ni == 0) {
      const std::uint64_t moved = c ^ (std::uint64_t{1} << i) ^ (std::uint64_t{1} << j);
      hop += std::conj(state.amplitudes[static_cast<Eigen::Index>(state.basis.rank(moved))]) * a;
    }
  }
  return (4.0 * hop.real() + zz) / 3.0;
}

CorrelationProfile correlation_profile(const StateVector& state, const Lattice& lattice, int anchor,
                                       int dx, int dy) {
  if (dx == 0 && dy == 0) throw ValidationError("displacement direction must be nonzero");
  CorrelationProfile p{anchor, {}, {}};
  const int x0 = lattice.ix(anchor);
  const int y0 = lattice.iy(anchor);
  for (int l = 1;; ++l) {
    const int x = x0 + l * dx;
    const int y = y0 + l * dy;
    if (x < 0 || y < 0 || x >= lattice.nx() || y >= lattice.ny()) break;
    p.displacements.push_back(l);
    p.values.push_back(spin_correlation(state, anchor, lattice.index(x, y)));
  }
  if (p.displacements.empty()) throw ValidationError("displacement leaves the lattice immediately");
  return p;
}

double von_neumann_entropy(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double p = es.eigenvalues()[k];
    if (p > 1e-14) s -= p * std::log(p);
  }
  return s;
}

double entanglement_entropy(const StateVector& state, std::span<const int> partition) {
  const int n = state.basis.sites();
  if (partition.empty() || static_cast<int>(partition.size()) >= n) {
    throw ValidationError("partition must be a proper nonempty subset");
  }
  std::vector<int> side(partition.begin(), partition.end());
  if (2 * side.size() > static_cast<std::size_t>(n)) {
    // Schmidt symmetry: trace the smaller side.
    std::vector<int> complement;
    const std::uint64_t mask = subset_mask(partition);
    for (int s = 0; s < n; ++s) {
      if (((mask >> s) & 1U) == 0) complement.push_back(s);
    }
    side = std::move(complement);
  }
  return von_neumann_entropy(reduced_density(state, side).matrix);
}

double concurrence_product(const Eigen::Matrix4cd& rho) {
  validate_two_qubit(rho);
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(rho * spin_flipped(rho), false);
  std::array<double, 4> lambda{};
  for (int k = 0; k < 4; ++k) lambda[static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, es.eigenvalues()[k].real()));
  return wootters(lambda);
}

double concurrence_r_operator(const Eigen::Matrix4cd& rho) {
  validate_two_qubit(rho);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
  const Eigen::Vector4d w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::Matrix4cd sq = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  Eigen::Matrix4cd inner = sq * spin_flipped(rho) * sq;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> rs(inner, Eigen::EigenvaluesOnly);
  std::array<double, 4> lambda{};
  for (int k = 0; k < 4; ++k) lambda[static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, rs.eigenvalues()[k]));
  return wootters(lambda);
}

double concurrence(const ReducedDensity& rho) {
  if (rho.sites.size() != 2 || rho.matrix.rows() != 4 || rho.matrix.cols() != 4) {
    throw ValidationError("concurrence needs a two-site density matrix");
  }
  return concurrence_product(rho.matrix);
}

double avg_nn_concurrence(const StateVector& state, const Lattice& lattice) {
  if (state.basis.sites() != lattice.size()) throw ValidationError("state and lattice sizes differ");
  double sum = 0.0;
  for (auto [i, j] : lattice.bonds()) {
    const int pair[2] = {i, j};
    sum += concurrence(reduced_density(state, pair));
  }
  return sum / static_cast<double>(lattice.bonds().size());
}

double avg_nn_concurrence(const Eigen::MatrixXcd& rho, const Lattice& lattice) {
  double sum = 0.0;
  for (auto [i, j] : lattice.bonds()) {
    const int pair[2] = {i, j};
    sum += concurrence(reduced_density(rho, lattice.size(), pair));
  }
  return sum / static_cast<double>(lattice.bonds().size());
}

}  // namespace dimerlab
