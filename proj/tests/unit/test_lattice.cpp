#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "dimerlab/errors.hpp"
#include "dimerlab/lattice.hpp"
#include "dimerlab/sector_basis.hpp"
#include "dimerlab/symmetry.hpp"

using namespace dimerlab;

TEST_CASE("row-major labelling and geometry") {
  const Lattice lat = Lattice::square(4, 3, 0.1);
  CHECK(lat.size() == 12);
  for (int s = 0; s < lat.size(); ++s) {
    CHECK(lat.index(lat.ix(s), lat.iy(s)) == s);
    CHECK(lat.coordinates()[static_cast<std::size_t>(s)].x == lat.ix(s));
    CHECK(lat.coordinates()[static_cast<std::size_t>(s)].y == lat.iy(s));
  }
  CHECK(lat.distance(0, 5) == doctest::Approx(std::sqrt(2.0)));
  CHECK(lat.distance(3, 0) == 3.0);
  CHECK(lat.distance(7, 7) == 0.0);
  // 3 rows of 3 horizontal bonds, 2 x 4 vertical bonds.
  CHECK(lat.bonds().size() == 17);
  for (auto [i, j] : lat.bonds()) {
    CHECK(i < j);
    CHECK(lat.are_neighbors(i, j));
    CHECK(lat.on_sublattice_a(i) != lat.on_sublattice_a(j));
  }
  const auto mx = lat.mirror_x();
  const auto my = lat.mirror_y();
  CHECK(mx[lat.index(0, 1)] == lat.index(3, 1));
  CHECK(my[lat.index(1, 0)] == lat.index(1, 2));
  CHECK(std::set<int>(mx.begin(), mx.end()).size() == 12u);
}

TEST_CASE("chains") {
  const Lattice c = Lattice::chain(5, 0.3);
  CHECK(c.kind() == LatticeKind::Chain);
  CHECK(c.ny() == 1);
  CHECK(c.bonds().size() == 4);
  CHECK(c.with_spacing(0.7).spacing() == 0.7);
}

TEST_CASE("lattice validation") {
  CHECK_THROWS_AS(Lattice::chain(1, 0.1), ValidationError);
  CHECK_THROWS_AS(Lattice::square(2, 2, 0.0), ValidationError);
  CHECK_THROWS_AS(Lattice::square(2, 2, -0.1), ValidationError);
  CHECK_THROWS_AS(Lattice::square(2, 2, std::numeric_limits<double>::infinity()), ValidationError);
  CHECK_THROWS_AS(Lattice::square(8, 8, 0.1), CapacityError);
}

TEST_CASE("sector basis ranks") {
  for (auto [n, k] : {std::pair{1, 0}, {4, 2}, {8, 4}, {10, 3}, {16, 8}}) {
    const SectorBasis b(n, k);
    CHECK(b.dimension() == binomial(n, k));
    CHECK(std::is_sorted(b.configs().begin(), b.configs().end()));
    for (std::size_t r = 0; r < b.dimension(); ++r) {
      CHECK(std::popcount(b.config(r)) == k);
      CHECK(b.rank(b.config(r)) == r);
    }
  }
  const SectorBasis b(6, 3);
  CHECK_FALSE(b.contains(0b111100));
  CHECK_THROWS_AS(b.rank(0b1), DomainError);
  CHECK_THROWS_AS(SectorBasis(20, 10, 1000), CapacityError);
  CHECK(binomial(40, 20) == 137846528820ULL);
}

TEST_CASE("symmetry blocks partition the sector") {
  const Lattice lat = Lattice::square(4, 2, 0.1);
  const SectorBasis basis(8, 4);
  const auto dec = symmetry_blocks(lat, basis);
  Eigen::Index total = 0;
  Eigen::MatrixXd p(basis.dimension(), 0);
  for (const auto& b : dec.blocks) {
    total += b.dimension();
    Eigen::MatrixXd d = Eigen::MatrixXd(b.isometry);
    CHECK((d.transpose() * d - Eigen::MatrixXd::Identity(d.cols(), d.cols())).norm() < 1e-12);
    p.conservativeResize(Eigen::NoChange, p.cols() + d.cols());
    p.rightCols(d.cols()) = d;
  }
  CHECK(total == static_cast<Eigen::Index>(basis.dimension()));
  CHECK((p.transpose() * p - Eigen::MatrixXd::Identity(total, total)).norm() < 1e-12);
  CHECK(dec.generators.size() == 3);
}
