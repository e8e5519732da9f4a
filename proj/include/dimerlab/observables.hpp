#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dimerlab/lattice.hpp"
#include "dimerlab/state.hpp"

namespace dimerlab {

inline constexpr std::size_t kReducedDensityCap = 12;

/// Density operator on `sites`. Local index bit k is the occupation of sites[k].
struct ReducedDensity {
  std::vector<int> sites;
  Eigen::MatrixXcd matrix;
};

/// Partial trace of a sector state over the complement of `subset`.
ReducedDensity reduced_density(const StateVector& state, std::span<const int> subset);

/// Partial trace of a full 2^N density matrix (bit i of the row index = atom i).
ReducedDensity reduced_density(const Eigen::MatrixXcd& rho, int sites, std::span<const int> subset);

/// (1/3) <sx_i sx_j + sy_i sy_j + sz_i sz_j>.
double spin_correlation(const StateVector& state, int i, int j);

struct CorrelationProfile {
  int anchor = 0;
  std::vector<int> displacements;
  std::vector<double> values;
};

/// Correlations between `anchor` and anchor + (dx, dy) * l for l = 1.. while on the lattice.
CorrelationProfile correlation_profile(const StateVector& state, const Lattice& lattice, int anchor,
                                       int dx, int dy);

/// Von Neumann entropy (natural log) of the reduced state on `partition`.
double entanglement_entropy(const StateVector& state, std::span<const int> partition);

double von_neumann_entropy(const Eigen::MatrixXcd& rho);

/// Wootters concurrence of a two-qubit density matrix (square roots of the
/// eigenvalues of rho * rho_tilde).
double concurrence(const ReducedDensity& rho);

/// Same quantity from the eigenvalues of R = sqrt(sqrt(rho) rho_tilde sqrt(rho)).
double concurrence_r_operator(const Eigen::Matrix4cd& rho);
double concurrence_product(const Eigen::Matrix4cd& rho);

double avg_nn_concurrence(const StateVector& state, const Lattice& lattice);
double avg_nn_concurrence(const Eigen::MatrixXcd& rho, const Lattice& lattice);

}  // namespace dimerlab
