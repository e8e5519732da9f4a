#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dimerlab/dimer_covering.hpp"
#include "dimerlab/errors.hpp"
#include "dimerlab/observables.hpp"

using namespace dimerlab;

namespace {

StateVector random_state(int n, int k, unsigned seed) {
  const SectorBasis b(n, k);
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd a(static_cast<Eigen::Index>(b.dimension()));
  for (auto& x : a) x = cplx(g(rng), g(rng));
  return StateVector(b, a.normalized());
}

Eigen::Matrix4cd random_two_qubit(unsigned seed, int rank) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(4, rank);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = cplx(g(rng), g(rng));
  Eigen::Matrix4cd rho = a * a.adjoint();
  return rho / rho.trace().real();
}

Eigen::Matrix4cd singlet_matrix() {
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  return v * v.adjoint();
}

}  // namespace

TEST_CASE("concurrence anchors") {
  CHECK(std::abs(concurrence_product(singlet_matrix()) - 1.0) < 1e-12);
  CHECK(std::abs(concurrence_r_operator(singlet_matrix()) - 1.0) < 1e-12);
  Eigen::Matrix4cd gg = Eigen::Matrix4cd::Zero();
  gg(0, 0) = 1.0;
  CHECK(concurrence_product(gg) < 1e-12);
  CHECK(concurrence_r_operator(gg) < 1e-12);
  CHECK(concurrence(ReducedDensity{{0, 1}, gg}) < 1e-12);
  // Werner states: C = max(0, (3p - 1) / 2).
  for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0}) {
    const Eigen::Matrix4cd w = p * singlet_matrix() + (1 - p) / 4 * Eigen::Matrix4cd::Identity();
    CHECK(concurrence_product(w) == doctest::Approx(std::max(0.0, (3 * p - 1) / 2)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("both concurrence paths agree") {
  for (unsigned seed = 1; seed <= 40; ++seed) {
    const Eigen::Matrix4cd rho = random_two_qubit(seed, 1 + static_cast<int>(seed % 4));
    CAPTURE(seed);
    // square roots of near-zero eigenvalues amplify rounding for rank-deficient rho
    const double tol = seed % 4 == 3 ? 1e-10 : 1e-7;
    CHECK(std::abs(concurrence_product(rho) - concurrence_r_operator(rho)) < tol);
  }
  Eigen::Matrix4cd bad = singlet_matrix();
  bad(0, 1) = 0.3;
  CHECK_THROWS_AS(concurrence_product(bad), DomainError);
  CHECK_THROWS_AS(concurrence_r_operator(2.0 * singlet_matrix()), DomainError);
  CHECK_THROWS_AS(concurrence(ReducedDensity{{0, 1, 2}, Eigen::MatrixXcd::Identity(8, 8) / 8.0}), ValidationError);
}

TEST_CASE("partial trace matches an explicit full-space sum") {
  const StateVector psi = random_state(6, 3, 7);
  const Eigen::VectorXcd full = psi.embed();
  const std::vector<int> subset{4, 1};
  const auto red = reduced_density(psi, subset);
  Eigen::MatrixXcd ref = Eigen::MatrixXcd::Zero(4, 4);
  for (int a = 0; a < 64; ++a) {
    for (int b = 0; b < 64; ++b) {
      const int rest_a = a & ~((1 << 4) | (1 << 1));
      const int rest_b = b & ~((1 << 4) | (1 << 1));
      if (rest_a != rest_b) continue;
      const int la = ((a >> 4) & 1) | (((a >> 1) & 1) << 1);
      const int lb = ((b >> 4) & 1) | (((b >> 1) & 1) << 1);
      ref(la, lb) += full(a) * std::conj(full(b));
    }
  }
  CHECK(red.sites == subset);
  CHECK((red.matrix - ref).norm() < 1e-14);
  const Eigen::MatrixXcd rho = full * full.adjoint();
  CHECK((reduced_density(rho, 6, subset).matrix - ref).norm() < 1e-14);
  CHECK(red.matrix.trace().real() == doctest::Approx(1.0));
}

TEST_CASE("entropies") {
  const StateVector psi = random_state(8, 4, 3);
  const std::vector<int> a{0, 1, 5};
  const std::vector<int> b{2, 3, 4, 6, 7};
  CHECK(std::abs(entanglement_entropy(psi, a) - entanglement_entropy(psi, b)) < 1e-10);
  // Singlet pair: ln 2 across the bond.
  const Lattice pair = Lattice::chain(2, 1.0);
  const auto set = enumerate_coverings(pair);
  const StateVector singlet = rvb_state(set, SectorBasis(2, 1));
  const std::vector<int> one{0};
  CHECK(entanglement_entropy(singlet, one) == doctest::Approx(std::log(2.0)));
  CHECK(von_neumann_entropy(Eigen::MatrixXcd::Identity(4, 4) / 4.0) == doctest::Approx(std::log(4.0)));
  const std::vector<int> all{0, 1};
  CHECK_THROWS_AS(entanglement_entropy(singlet, all), ValidationError);
}

TEST_CASE("subset validation") {
  const StateVector psi = random_state(6, 3, 1);
  const std::vector<int> dup{1, 1};
  const std::vector<int> out{0, 6};
  const std::vector<int> none;
  CHECK_THROWS_AS(reduced_density(psi, dup), ValidationError);
  CHECK_THROWS_AS(reduced_density(psi, out), ValidationError);
  CHECK_THROWS_AS(reduced_density(psi, none), ValidationError);
  const StateVector big = random_state(14, 1, 1);
  std::vector<int> many(13);
  for (int k = 0; k < 13; ++k) many[static_cast<std::size_t>(k)] = k;
  CHECK_THROWS_AS(reduced_density(big, many), CapacityError);
}

TEST_CASE("spin correlations") {
  const Lattice pair = Lattice::chain(2, 1.0);
  const StateVector singlet = rvb_state(enumerate_coverings(pair), SectorBasis(2, 1));
  CHECK(spin_correlation(singlet, 0, 1) == doctest::Approx(-1.0));
  // Triplet |01> + |10>: <s.s>/3 = 1/3.
  const StateVector triplet(SectorBasis(2, 1), Eigen::Vector2cd(1.0, 1.0).normalized());
  CHECK(spin_correlation(triplet, 0, 1) == doctest::Approx(1.0 / 3.0));
  // Product |10>: only zz = -1 contributes.
  const StateVector product(SectorBasis(2, 1), Eigen::Vector2cd(1.0, 0.0));
  CHECK(spin_correlation(product, 0, 1) == doctest::Approx(-1.0 / 3.0));
  CHECK_THROWS_AS(spin_correlation(singlet, 0, 0), ValidationError);

  const Lattice ladder = Lattice::square(2, 6, 0.1);
  const StateVector rvb = rvb_state(enumerate_coverings(ladder), SectorBasis(12, 6));
  const auto prof = correlation_profile(rvb, ladder, 0, 0, 1);
  CHECK(prof.displacements == std::vector<int>{1, 2, 3, 4, 5});
  CHECK(prof.values[0] == doctest::Approx(spin_correlation(rvb, 0, 2)));
  // Antiferromagnetic sign alternation with distance.
  CHECK(prof.values[0] < 0.0);
  CHECK(prof.values[1] > 0.0);
  CHECK_THROWS_AS(correlation_profile(rvb, ladder, 0, 0, 0), ValidationError);
  CHECK_THROWS_AS(correlation_profile(rvb, ladder, 0, -1, 0), ValidationError);
}

TEST_CASE("average nearest-neighbour concurrence from a state and from its density matrix") {
  const Lattice lat = Lattice::square(2, 3, 0.1);
  const StateVector rvb = rvb_state(enumerate_coverings(lat), SectorBasis(6, 3));
  const Eigen::VectorXcd full = rvb.embed();
  const double a = avg_nn_concurrence(rvb, lat);
  const double b = avg_nn_concurrence(Eigen::MatrixXcd(full * full.adjoint()), lat);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
  CHECK(a > 0.0);
  CHECK(a <= 1.0);
}
