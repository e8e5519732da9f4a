#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dimerlab/greens.hpp"
#include "dimerlab/hamiltonian.hpp"
#include "dimerlab/lattice.hpp"
#include "dimerlab/state.hpp"

// Open-system evolution on the full 2^N space. Density matrices use the
// computational basis: row index bit i set = atom i excited. Superoperators
// act on column-stacked vec(rho) (vec(A X B) = (B^T kron A) vec(X)).
namespace dimerlab {

inline constexpr int kLiouvillianSiteCap = 10;
/// Largest N for which the explicit sparse 4^N x 4^N matrix is built.
inline constexpr int kSuperoperatorSiteCap = 8;

enum class DrivePattern { Checkerboard, RowStaggered, Uniform };

std::string_view to_string(DrivePattern pattern);
DrivePattern drive_pattern_from_string(std::string_view name);
std::vector<int> drive_signs(const Lattice& lattice, DrivePattern pattern);

/// H_d = sum_i Omega p_i (s+_i + s-_i) - delta sum_i n_i.
struct DriveSpec {
  double rabi = 0.0;
  double detuning = 0.0;
  std::vector<int> pattern;  // +1 / -1 per site

  static DriveSpec make(const Lattice& lattice, double rabi, double detuning,
                        DrivePattern pattern = DrivePattern::Checkerboard);
  void validate(int sites) const;
};

namespace detail {
struct LiouvillianData;
}

class Liouvillian {
 public:
  /// Dissipative models only (the band-gap kernel has no dissipation matrix).
  Liouvillian(const Lattice& lattice, const GreensModel& model, const DriveSpec& drive);
  /// From an explicit symmetric coupling matrix G (Gamma = -Im G); any N >= 1.
  Liouvillian(const Eigen::MatrixXcd& coupling, const DriveSpec& drive);

  int sites() const noexcept;
  Eigen::Index hilbert_dimension() const noexcept;
  const DriveSpec& drive() const noexcept { return drive_; }

  /// Copy sharing all detuning-independent data.
  Liouvillian with_detuning(double detuning) const;

  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
  /// Adjoint with respect to the Hilbert-Schmidt inner product.
  Eigen::MatrixXcd apply_adjoint(const Eigen::MatrixXcd& x) const;

  /// Full H = H_eff + H_d, dense, computational basis.
  Eigen::MatrixXcd hamiltonian() const;

  /// Explicit superoperator, column stacking. CapacityError above kSuperoperatorSiteCap.
  SparseMatrixXcd superoperator() const;

  /// Power-iteration estimate of the spectral norm (a lower bound), cached.
  double norm_estimate() const;

  // Sector-ordered internal representation, used by the solvers.
  const detail::LiouvillianData& data() const noexcept { return *data_; }
  Eigen::MatrixXcd to_internal(const Eigen::MatrixXcd& rho) const;
  Eigen::MatrixXcd to_external(const Eigen::MatrixXcd& rho) const;
  Eigen::MatrixXcd apply_internal(const Eigen::MatrixXcd& rho) const;
  Eigen::MatrixXcd apply_adjoint_internal(const Eigen::MatrixXcd& x) const;

 private:
  Liouvillian(DriveSpec drive, std::shared_ptr<const detail::LiouvillianData> data);

  Eigen::MatrixXcd left_hamiltonian(const Eigen::MatrixXcd& x) const;  // H x

  DriveSpec drive_;
  std::shared_ptr<const detail::LiouvillianData> data_;
  mutable std::optional<double> norm_;
};

enum class SteadyStateMethod { Auto, Direct, Krylov, Integration };

std::string_view to_string(SteadyStateMethod method);
SteadyStateMethod steady_state_method_from_string(std::string_view name);

struct SteadyStateOptions {
  SteadyStateMethod method = SteadyStateMethod::Auto;
  /// Required ||L(rho)||_F / ||L||.
  double tolerance = 1e-10;
  /// Auto uses the sparse direct solver up to this many sites.
  int direct_site_cap = 6;
  int krylov_restart = 40;
  int krylov_max_iterations = 3000;
  /// Null-space test by dense SVD is done up to this many sites.
  int multiplicity_site_cap = 4;
  double integration_time_cap = 1e6;
};

struct SteadyStateResult {
  Eigen::MatrixXcd rho;  // computational basis
  double residual = 0.0;           // ||L(rho)||_F
  double relative_residual = 0.0;  // residual / ||L||
  double liouvillian_norm = 0.0;
  SteadyStateMethod method = SteadyStateMethod::Auto;
  int iterations = 0;
};

/// Unique trace-one solution of L(rho) = 0. Throws MultiplicityError when the
/// null space is degenerate, SolverError when the tolerance is not reached.
SteadyStateResult steady_state(const Liouvillian& l, const SteadyStateOptions& options = {});

struct EvolveOptions {
  double abs_tolerance = 1e-12;
  double rel_tolerance = 1e-10;
  double min_step = 1e-10;
  double initial_step = 1e-2;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::MatrixXcd> states;
};

/// Adaptive Runge-Kutta integration of d rho/dt = L(rho), sampled at `times`
/// (ascending, starting at or after 0). Rho is re-Hermitised after every step.
Trajectory time_evolve(const Liouvillian& l, const Eigen::MatrixXcd& rho0,
                       const std::vector<double>& times, const EvolveOptions& options = {});

/// |g...g><g...g| on N atoms.
Eigen::MatrixXcd ground_projector(int sites);

/// Throws DomainError unless rho is Hermitian, unit-trace and PSD within tolerance.
void validate_density_matrix(const Eigen::MatrixXcd& rho, double tolerance = 1e-8);

struct SweepPoint {
  double detuning = 0.0;
  double fidelity = 0.0;     // <phi|rho_st|phi>
  double concurrence = 0.0;  // average nearest-neighbour concurrence of rho_st
  double relative_residual = 0.0;
  SteadyStateMethod method = SteadyStateMethod::Auto;
  int iterations = 0;
};

struct DetuningSweep {
  std::vector<SweepPoint> points;
  cplx target_energy;
  double marker_energy = 0.0;          // Re E
  double marker_per_excitation = 0.0;  // 2 Re E / N
  double liouvillian_norm = 0.0;
};

/// Steady states along a detuning grid for a fixed drive amplitude and pattern.
/// `target` is a sector state; `target_energy` its complex energy (markers).
DetuningSweep detuning_sweep(const Lattice& lattice, const GreensModel& model, double rabi,
                             const std::vector<int>& pattern, const std::vector<double>& detunings,
                             const StateVector& target, cplx target_energy,
                             const SteadyStateOptions& options = {});

}  // namespace dimerlab
