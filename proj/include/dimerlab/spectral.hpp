#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dimerlab/greens.hpp"
#include "dimerlab/hamiltonian.hpp"
#include "dimerlab/lattice.hpp"
#include "dimerlab/state.hpp"
#include "dimerlab/symmetry.hpp"

namespace dimerlab {

struct SpectralOptions {
  /// Largest sector dimension accepted by the dense solvers.
  std::size_t dense_cap = 20000;
  /// Block-diagonalise with lattice reflections and excitation flip when the
  /// Hamiltonian carries its lattice.
  bool use_symmetry = true;
  /// Skip blocks whose Hermitian lower bound on the decay rate already
  /// exceeds the best rate found (least_radiant only).
  bool prune = true;
  /// Decay rates closer than this are treated as degenerate.
  double tie_tolerance = 1e-9;
  double residual_tolerance = 1e-8;
};

/// Decay rate -2 Im(lambda) of an eigenvalue.
inline double decay_rate(cplx eigenvalue) { return -2.0 * eigenvalue.imag(); }

/// Complete spectrum with eigenvectors stored per symmetry block.
class SpectrumResult {
 public:
  bool hermitian() const noexcept { return hermitian_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }

  /// Eigenvalues in solver order.
  const Eigen::VectorXcd& eigenvalues() const noexcept { return values_; }
  /// ordering()[s] is the solver index of the s-th state: ascending decay rate,
  /// or ascending energy for Hermitian input. s = 0 is the least radiant state.
  const std::vector<std::size_t>& ordering() const noexcept { return ordering_; }

  cplx eigenvalue(std::size_t s) const { return values_[static_cast<Eigen::Index>(ordering_.at(s))]; }
  double decay(std::size_t s) const { return decay_rate(eigenvalue(s)); }
  /// Unit eigenvector of the s-th state in the sector basis.
  StateVector state(std::size_t s) const;

  /// Largest ||H v - lambda v|| / ||H||_F over all pairs.
  double max_relative_residual() const noexcept { return max_residual_; }

 private:
  friend SpectrumResult eigendecompose(const EffectiveHamiltonian&, const SpectralOptions&);

  struct Block {
    std::shared_ptr<const Eigen::SparseMatrix<double>> isometry;
    Eigen::MatrixXcd vectors;
    std::size_t offset = 0;
  };

  SectorBasis basis_{2, 1};
  bool hermitian_ = false;
  Eigen::VectorXcd values_;
  std::vector<std::size_t> ordering_;
  std::vector<Block> blocks_;
  double max_residual_ = 0.0;
};

/// Full dense eigendecomposition (general complex solver, or Hermitian solver
/// when flagged), per symmetry block.
SpectrumResult eigendecompose(const EffectiveHamiltonian& h, const SpectralOptions& options = {});

struct LeastRadiantResult {
  cplx eigenvalue;
  double decay = 0.0;
  StateVector state;
  double relative_residual = 0.0;
  /// Eigenvalues whose decay rate lies within the tie tolerance of the minimum.
  std::size_t degenerate_count = 1;
  bool tie_broken_by_reference = false;
  std::size_t blocks_total = 0;
  std::size_t blocks_solved = 0;
};

/// Least radiant eigenstate (smallest decay rate). When several eigenvalues
/// tie within `tie_tolerance`, the one with the largest overlap with
/// `reference` is chosen.
LeastRadiantResult least_radiant(const EffectiveHamiltonian& h, const StateVector* reference = nullptr,
                                 const SpectralOptions& options = {});

struct GroundStateResult {
  double energy = 0.0;
  StateVector state;
  double relative_residual = 0.0;
  std::size_t degenerate_count = 1;
};

/// Lowest eigenpair of a Hermitian sector Hamiltonian.
GroundStateResult ground_state(const EffectiveHamiltonian& h, const StateVector* reference = nullptr,
                               const SpectralOptions& options = {});

struct PairRates {
  double dimer = 0.0;    // singlet decay rate
  double triplet = 0.0;  // triplet decay rate
};

/// Collective decay rates of a two-atom singlet / triplet at separation `argument` (= k0 x).
PairRates pair_rates(const GreensModel& model, double argument);

/// True iff every nearest-neighbour dimer decays strictly slower than every
/// longer-range dimer and every triplet on `lattice`.
bool dimerization_condition(const GreensModel& model, const Lattice& lattice);

struct ConditionMap {
  std::vector<std::pair<int, int>> shapes;  // (nx, ny) per row
  std::vector<double> spacings;             // k0 d per column
  std::vector<std::vector<bool>> holds;     // holds[row][col]
};

ConditionMap condition_map(const GreensModel& model, const std::vector<std::pair<int, int>>& shapes,
                           const std::vector<double>& spacings);

/// |<a|b>|^2.
double fidelity(const StateVector& a, const StateVector& b);

/// (1 - F) / N.
double infidelity_density(double fidelity, int sites);

struct DecayPoint {
  int nx = 0;
  int ny = 0;
  int sites = 0;
  double least_radiant_decay = 0.0;
  double dimer_bound = 0.0;  // (N / 2) * gamma_D of a nearest-neighbour pair
};

std::vector<DecayPoint> decay_scaling(const GreensModel& model,
                                      const std::vector<std::pair<int, int>>& shapes, double spacing,
                                      const SpectralOptions& options = {});

}  // namespace dimerlab
