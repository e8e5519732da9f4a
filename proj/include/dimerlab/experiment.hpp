#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dimerlab/dimer_covering.hpp"
#include "dimerlab/dynamics.hpp"
#include "dimerlab/greens.hpp"
#include "dimerlab/lattice.hpp"
#include "dimerlab/spectral.hpp"

namespace dimerlab {

using Shape = std::pair<int, int>;  // (nx, ny); ny == 1 is a chain

Lattice make_lattice(Shape shape, double spacing);

/// A model evaluated on a list of lattices over a list of spacings.
/// Spacings are multiples of pi (0.1 means k0 d = 0.1 pi).
struct SeriesSpec {
  std::string label;
  Kernel model = Kernel::Waveguide2D;
  std::vector<double> spacings;
  std::vector<Shape> lattices;
};

/// Correlation profile from `anchor` (0-indexed (ix, iy)) along `direction`.
struct CorrelationSpec {
  Shape lattice;
  Shape anchor;
  Shape direction;
  std::string state;  // "least_radiant" or "rvb"
  Kernel model = Kernel::Waveguide2D;
  double spacing = 0.1;
};

struct SolverSettings {
  std::size_t dense_cap = 20000;
  double tie_tolerance = 1e-9;
  double residual_tolerance = 1e-8;
  SteadyStateMethod steady_state = SteadyStateMethod::Auto;
  double steady_tolerance = 1e-10;
  int krylov_restart = 40;

  SpectralOptions spectral() const;
  SteadyStateOptions steady() const;
};

struct ExperimentConfig {
  std::string experiment;
  std::string output;
  SolverSettings solver;
  std::vector<SeriesSpec> series;
  std::vector<CorrelationSpec> correlations;  // fig4
  std::vector<double> detunings;              // fig5
  double rabi = 0.05;
  DrivePattern pattern = DrivePattern::Checkerboard;
  std::vector<double> xi;  // fig7
  double coupling = 1.0;
};

struct PresetInfo {
  std::string name;
  std::string description;
  nlohmann::json defaults;
};

const std::vector<PresetInfo>& presets();

/// Merges `j` over the defaults of the preset named by j["experiment"] and
/// validates the result. Errors name the offending field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully resolved config; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ExperimentConfig& config);

struct RunSummary {
  std::vector<std::filesystem::path> files;  // CSV files written (each with a .json sidecar)
  double max_eigen_residual = 0.0;
  double max_steady_residual = 0.0;
};

RunSummary run_experiment(const ExperimentConfig& config);

// Building blocks shared by the runner and the tests.

struct RvbComparison {
  StateVector rvb;
  LeastRadiantResult least_radiant;
  double fidelity = 0.0;
};

/// Least radiant half-filling state of `lattice` and its overlap with the RVB
/// state (built here unless `rvb` is supplied).
RvbComparison compare_least_radiant(const Lattice& lattice, const GreensModel& model,
                                    const SpectralOptions& options = {},
                                    const StateVector* rvb = nullptr);

struct GroundComparison {
  StateVector rvb;
  GroundStateResult ground;
  double fidelity = 0.0;
};

/// Half-filling ground state of the band-gap Hamiltonian and its RVB overlap.
GroundComparison compare_ground_state(const Lattice& lattice, const GreensModel& model,
                                      const SpectralOptions& options = {});

/// Sites of the x = 0 column (long-edge cut of a 2 x Ny ladder) and of the
/// rows y < ny / 2 (short-edge cut).
std::vector<int> long_edge_partition(const Lattice& lattice);
std::vector<int> short_edge_partition(const Lattice& lattice);

}  // namespace dimerlab
