#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dimerlab {

enum class LatticeKind { Chain, Square };

struct Site {
  double x = 0.0;
  double y = 0.0;
};

using Bond = std::pair<int, int>;

/// Rectangular arrangement of atoms with unit lattice constant d.
///
/// Sites are labelled row-major: index = ix + nx * iy, row iy = 0 first.
/// `spacing` is the dimensionless optical phase k0*d accumulated per lattice
/// constant; geometry itself is always stored in units of d.
class Lattice {
 public:
  static Lattice chain(int n, double spacing);
  static Lattice square(int nx, int ny, double spacing);

  LatticeKind kind() const noexcept { return kind_; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  int size() const noexcept { return nx_ * ny_; }
  double spacing() const noexcept { return spacing_; }

  /// Same geometry at a different k0*d.
  Lattice with_spacing(double spacing) const;

  int index(int ix, int iy) const { return ix + nx_ * iy; }
  int ix(int site) const { return site % nx_; }
  int iy(int site) const { return site / nx_; }

  std::span<const Site> coordinates() const noexcept { return coords_; }

  /// Checkerboard parity; nearest neighbours always differ.
  bool on_sublattice_a(int site) const { return (ix(site) + iy(site)) % 2 == 0; }

  /// Euclidean distance in units of d.
  double distance(int i, int j) const;
  bool are_neighbors(int i, int j) const;

  /// Nearest-neighbour bonds (i < j), horizontal bonds first in row-major order,
  /// then vertical bonds.
  const std::vector<Bond>& bonds() const noexcept { return bonds_; }

  /// Site permutations realising the reflections x -> nx-1-x and y -> ny-1-y.
  std::vector<int> mirror_x() const;
  std::vector<int> mirror_y() const;

  std::string label() const;

 private:
  Lattice(LatticeKind kind, int nx, int ny, double spacing);

  LatticeKind kind_;
  int nx_;
  int ny_;
  double spacing_;
  std::vector<Site> coords_;
  std::vector<Bond> bonds_;
};

}  // namespace dimerlab
