#include "dimerlab/lattice.hpp"

#include <cmath>
#include <cstdlib>

#include "dimerlab/errors.hpp"

namespace dimerlab {

Lattice::Lattice(LatticeKind kind, int nx, int ny, double spacing)
    : kind_(kind), nx_(nx), ny_(ny), spacing_(spacing) {
  if (nx < 1 || ny < 1 || nx * ny < 2) {
    throw ValidationError("lattice needs at least two sites, got " + std::to_string(nx) + "x" +
                          std::to_string(ny));
  }
  if (nx * ny > 63) {
    throw CapacityError("lattice too large for 64-bit occupation words",
                        static_cast<std::size_t>(nx * ny), 63);
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw ValidationError("lattice spacing k0*d must be positive and finite");
  }
  coords_.reserve(static_cast<std::size_t>(size()));
  for (int iy = 0; iy < ny_; ++iy) {
    for (int ix = 0; ix < nx_; ++ix) {
      coords_.push_back({static_cast<double>(ix), static_cast<double>(iy)});
    }
  }
  for (int iy = 0; iy < ny_; ++iy) {
    for (int ix = 0; ix + 1 < nx_; ++ix) bonds_.emplace_back(index(ix, iy), index(ix + 1, iy));
  }
  for (int iy = 0; iy + 1 < ny_; ++iy) {
    for (int ix = 0; ix < nx_; ++ix) bonds_.emplace_back(index(ix, iy), index(ix, iy + 1));
  }
}

Lattice Lattice::chain(int n, double spacing) { return Lattice(LatticeKind::Chain, n, 1, spacing); }

Lattice Lattice::square(int nx, int ny, double spacing) {
  return Lattice(LatticeKind::Square, nx, ny, spacing);
}

Lattice Lattice::with_spacing(double spacing) const { return Lattice(kind_, nx_, ny_, spacing); }

double Lattice::distance(int i, int j) const {
  const auto& a = coords_.at(static_cast<std::size_t>(i));
  const auto& b = coords_.at(static_cast<std::size_t>(j));
  return std::hypot(a.x - b.x, a.y - b.y);
}

bool Lattice::are_neighbors(int i, int j) const {
  return std::abs(ix(i) - ix(j)) + std::abs(iy(i) - iy(j)) == 1;
}

std::vector<int> Lattice::mirror_x() const {
  std::vector<int> perm(static_cast<std::size_t>(size()));
  for (int s = 0; s < size(); ++s) perm[static_cast<std::size_t>(s)] = index(nx_ - 1 - ix(s), iy(s));
  return perm;
}

std::vector<int> Lattice::mirror_y() const {
  std::vector<int> perm(static_cast<std::size_t>(size()));
  for (int s = 0; s < size(); ++s) perm[static_cast<std::size_t>(s)] = index(ix(s), ny_ - 1 - iy(s));
  return perm;
}

std::string Lattice::label() const {
  if (kind_ == LatticeKind::Chain) return "chain" + std::to_string(size());
  return std::to_string(nx_) + "x" + std::to_string(ny_);
}

}  // namespace dimerlab
