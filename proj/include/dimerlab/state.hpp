#pragma once

#include <Eigen/Dense>

#include "dimerlab/greens.hpp"
#include "dimerlab/sector_basis.hpp"

namespace dimerlab {

/// Pure state confined to one excitation sector.
struct StateVector {
  SectorBasis basis;
  Eigen::VectorXcd amplitudes;

  StateVector(SectorBasis b, Eigen::VectorXcd a);

  double norm() const { return amplitudes.norm(); }
  StateVector& normalize();
  /// Rotate the global phase so the lowest-rank nonzero amplitude is real positive.
  StateVector& canonicalize_phase(double threshold = 1e-12);

  /// Amplitudes in the full 2^N computational basis (bit i = atom i excited).
  Eigen::VectorXcd embed() const;
};

/// <a|b>; throws ValidationError on basis mismatch.
cplx inner_product(const StateVector& a, const StateVector& b);

}  // namespace dimerlab
