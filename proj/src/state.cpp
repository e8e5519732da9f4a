#include "dimerlab/state.hpp"

#include <cmath>

#include "dimerlab/errors.hpp"

namespace dimerlab {

StateVector::StateVector(SectorBasis b, Eigen::VectorXcd a)
    : basis(std::move(b)), amplitudes(std::move(a)) {
  if (static_cast<std::size_t>(amplitudes.size()) != basis.dimension()) {
    throw ValidationError("amplitude vector length does not match the sector dimension");
  }
}

StateVector& StateVector::normalize() {
  const double n = norm();
  if (!(n > 0.0)) throw DomainError("cannot normalise a zero state");
  amplitudes /= n;
  return *this;
}

StateVector& StateVector::canonicalize_phase(double threshold) {
  for (Eigen::Index k = 0; k < amplitudes.size(); ++k) {
    const double mag = std::abs(amplitudes[k]);
    if (mag > threshold) {
      amplitudes *= std::conj(amplitudes[k]) / mag;
      amplitudes[k] = mag;
      break;
    }
  }
  return *this;
}

Eigen::VectorXcd StateVector::embed() const {
  if (basis.sites() > 24) throw CapacityError("full Hilbert space embedding", basis.sites(), 24);
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(Eigen::Index{1} << basis.sites());
  for (std::size_t k = 0; k < basis.dimension(); ++k) {
    full[static_cast<Eigen::Index>(basis.config(k))] = amplitudes[static_cast<Eigen::Index>(k)];
  }
  return full;
}

cplx inner_product(const StateVector& a, const StateVector& b) {
  if (!(a.basis == b.basis)) throw ValidationError("states live in different sectors");
  return a.amplitudes.dot(b.amplitudes);
}

}  // namespace dimerlab
