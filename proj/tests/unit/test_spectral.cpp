#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "dimerlab/dimer_covering.hpp"
#include "dimerlab/errors.hpp"
#include "dimerlab/hamiltonian.hpp"
#include "dimerlab/spectral.hpp"

using namespace dimerlab;
using std::numbers::pi;

namespace {

// sigma^+ on atom i of n, built from Kronecker products (atom 0 = least significant bit).
Eigen::MatrixXcd raise_full(int i, int n) {
  Eigen::Matrix2cd sp = Eigen::Matrix2cd::Zero();
  sp(1, 0) = 1.0;
  const Eigen::MatrixXcd left = Eigen::MatrixXcd::Identity(1 << (n - 1 - i), 1 << (n - 1 - i));
  const Eigen::MatrixXcd right = Eigen::MatrixXcd::Identity(1 << i, 1 << i);
  return Eigen::kroneckerProduct(left, Eigen::MatrixXcd(Eigen::kroneckerProduct(sp, right))).eval();
}

// Full-space H = sum_ij G_ij s+_i s-_j restricted to the sector rows and columns.
Eigen::MatrixXcd sector_from_full_space(const Eigen::MatrixXcd& g, const SectorBasis& basis) {
  const int n = static_cast<int>(g.rows());
  const int dim = 1 << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<Eigen::MatrixXcd> up;
  for (int i = 0; i < n; ++i) up.push_back(raise_full(i, n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) h += g(i, j) * up[i] * up[j].adjoint();
  }
  const auto d = static_cast<Eigen::Index>(basis.dimension());
  Eigen::MatrixXcd out(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      out(a, b) = h(static_cast<Eigen::Index>(basis.config(a)), static_cast<Eigen::Index>(basis.config(b)));
    }
  }
  return out;
}

std::vector<double> sorted_rates(const Eigen::VectorXcd& values) {
  std::vector<double> r;
  for (auto v : values) r.push_back(decay_rate(v));
  std::sort(r.begin(), r.end());
  return r;
}

}  // namespace

TEST_CASE("sector Hamiltonian equals the full-space operator restricted to the sector") {
  struct Case {
    Lattice lat;
    GreensModel model;
    int exc;
  };
  const Case cases[] = {{Lattice::square(2, 2, 0.1 * pi), GreensModel::waveguide_2d(), 2},
                        {Lattice::square(3, 2, 0.4 * pi), GreensModel::free_space(), 3},
                        {Lattice::chain(6, 0.3 * pi), GreensModel::waveguide_1d(), 2},
                        {Lattice::square(2, 3, 1.0), GreensModel::band_gap(1.0, 0.7), 3}};
  for (const auto& c : cases) {
    const SectorBasis basis(c.lat.size(), c.exc);
    const auto h = assemble_hamiltonian(c.lat, c.model, basis);
    const Eigen::MatrixXcd dense = h.to_dense();
    const Eigen::MatrixXcd ref = sector_from_full_space(coupling_matrix(c.lat, c.model), basis);
    CHECK((dense - ref).norm() < 1e-13);
    CHECK((dense - dense.transpose()).norm() < 1e-14);
    CHECK(h.hermitian == !c.model.dissipative());
    if (h.hermitian) CHECK((dense - dense.adjoint()).norm() < 1e-12);
  }
}

TEST_CASE("symmetry-blocked spectrum equals the plain dense spectrum") {
  for (const auto& model : {GreensModel::waveguide_2d(), GreensModel::free_space()}) {
    const Lattice lat = Lattice::square(4, 2, 0.27 * pi);
    const SectorBasis basis(8, 4);
    const auto h = assemble_hamiltonian(lat, model, basis);
    const auto spec = eigendecompose(h);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h.to_dense(), false);
    const auto a = sorted_rates(spec.eigenvalues());
    const auto b = sorted_rates(es.eigenvalues());
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) < 1e-10);
    CHECK(spec.max_relative_residual() < 1e-10);
    // Ordering is by decay rate; eigenvectors are unit and satisfy H v = lambda v.
    for (std::size_t s = 0; s + 1 < spec.size(); ++s) CHECK(spec.decay(s) <= spec.decay(s + 1) + 1e-14);
    const Eigen::MatrixXcd dense = h.to_dense();
    for (std::size_t s : {std::size_t{0}, std::size_t{7}, spec.size() - 1}) {
      const auto v = spec.state(s);
      CHECK(v.norm() == doctest::Approx(1.0));
      CHECK((dense * v.amplitudes - spec.eigenvalue(s) * v.amplitudes).norm() < 1e-10);
    }
  }
}

TEST_CASE("least radiant state") {
  const Lattice lat = Lattice::square(2, 2, 0.1 * pi);
  const SectorBasis basis(4, 2);
  const auto h = assemble_hamiltonian(lat, GreensModel::waveguide_2d(), basis);
  const auto lr = least_radiant(h);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h.to_dense());
  Eigen::Index k = 0;
  (-es.eigenvalues().imag()).minCoeff(&k);
  CHECK(std::abs(lr.eigenvalue - es.eigenvalues()(k)) < 1e-12);
  CHECK(lr.decay == doctest::Approx(decay_rate(es.eigenvalues()(k))));
  CHECK(lr.degenerate_count == 1);
  const Eigen::VectorXcd ref = es.eigenvectors().col(k).normalized();
  CHECK(std::abs(ref.dot(lr.state.amplitudes)) == doctest::Approx(1.0).epsilon(1e-10));

  // Same answer with and without symmetry blocks and pruning.
  SpectralOptions plain;
  plain.use_symmetry = false;
  plain.prune = false;
  const auto lr2 = least_radiant(h, nullptr, plain);
  CHECK(std::abs(lr2.eigenvalue - lr.eigenvalue) < 1e-12);
  CHECK(fidelity(lr.state, lr2.state) == doctest::Approx(1.0).epsilon(1e-10));

  // Values quoted in the outputs of this configuration.
  const auto rvb = rvb_state(enumerate_coverings(lat), basis);
  CHECK(fidelity(rvb, lr.state) > 0.99);
}

TEST_CASE("survival probability decays at the reported rate") {
  const Lattice lat = Lattice::square(2, 2, 0.3 * pi);
  const SectorBasis basis(4, 2);
  const auto h = assemble_hamiltonian(lat, GreensModel::free_space(), basis);
  const auto lr = least_radiant(h);
  const Eigen::MatrixXcd dense = h.to_dense();
  // Least-squares slope of log P(t) on a grid, P(t) = |<psi| exp(-iHt) |psi>|^2.
  std::vector<double> ts, logs;
  for (int k = 0; k <= 20; ++k) {
    const double t = 0.5 * k;
    const Eigen::MatrixXcd u = (cplx(0.0, -t) * dense).exp();
    const cplx amp = lr.state.amplitudes.dot(u * lr.state.amplitudes);
    ts.push_back(t);
    logs.push_back(std::log(std::norm(amp)));
  }
  const double n = static_cast<double>(ts.size());
  double st = 0, sl = 0, stt = 0, stl = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    st += ts[k];
    sl += logs[k];
    stt += ts[k] * ts[k];
    stl += ts[k] * logs[k];
  }
  const double slope = (n * stl - st * sl) / (n * stt - st * st);
  CHECK(-slope == doctest::Approx(lr.decay).epsilon(1e-8));
}

TEST_CASE("Dicke limit: singlets are dark") {
  const auto r0 = pair_rates(GreensModel::waveguide_1d(), 0.0);
  CHECK(std::abs(r0.dimer) < 1e-12);
  CHECK(std::abs(r0.triplet - 2.0) < 1e-12);
  const auto rpi = pair_rates(GreensModel::waveguide_1d(), pi);
  CHECK(std::abs(rpi.dimer - 2.0) < 1e-12);
  CHECK(std::abs(rpi.triplet) < 1e-12);
  // Pair rates from the 2 x 2 single-excitation block G11 +- G12.
  for (const auto& m : {GreensModel::waveguide_2d(), GreensModel::free_space()}) {
    const double u = 0.77;
    const cplx g12 = greens_kernel(m, u, false);
    const auto r = pair_rates(m, u);
    CHECK(r.dimer == doctest::Approx(decay_rate(cplx(0, -0.5) - g12)));
    CHECK(r.triplet == doctest::Approx(decay_rate(cplx(0, -0.5) + g12)));
  }
  CHECK_THROWS_AS(pair_rates(GreensModel::band_gap(1, 1), 1.0), UnsupportedError);
}

TEST_CASE("band-gap ground state") {
  const Lattice lat = Lattice::square(2, 4, 1.0);
  const SectorBasis basis(8, 4);
  const auto h = assemble_hamiltonian(lat, GreensModel::band_gap(1.0, 0.1), basis);
  const auto gs = ground_state(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.to_dense());
  CHECK(gs.energy == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-12));
  CHECK(std::abs(es.eigenvectors().col(0).dot(gs.state.amplitudes)) == doctest::Approx(1.0).epsilon(1e-9));
  const auto rvb = rvb_state(enumerate_coverings(lat), basis);
  CHECK(fidelity(rvb, gs.state) > 0.9);
  CHECK_THROWS_AS(least_radiant(h), UnsupportedError);
  CHECK_THROWS_AS(ground_state(assemble_hamiltonian(lat, GreensModel::waveguide_2d(), basis)), UnsupportedError);
}

TEST_CASE("capacity and sector checks") {
  const Lattice lat = Lattice::square(4, 2, 0.1);
  const auto h = assemble_hamiltonian(lat, GreensModel::waveguide_2d(), SectorBasis(8, 4));
  SpectralOptions tiny;
  tiny.dense_cap = 10;
  CHECK_THROWS_AS(eigendecompose(h, tiny), CapacityError);
  CHECK_THROWS_AS(least_radiant(h, nullptr, tiny), CapacityError);
  const StateVector wrong(SectorBasis(8, 3), Eigen::VectorXcd::Ones(56).normalized());
  CHECK_THROWS_AS(least_radiant(h, &wrong), ValidationError);
  CHECK_THROWS_AS(infidelity_density(1.5, 4), DomainError);
  CHECK(infidelity_density(0.8, 4) == doctest::Approx(0.05));
}

TEST_CASE("dimerization condition") {
  CHECK(dimerization_condition(GreensModel::waveguide_2d(), Lattice::square(4, 4, 0.1 * pi)));
  bool fails = false;
  for (int n = 2; n <= 40; ++n) fails = fails || !dimerization_condition(GreensModel::waveguide_1d(), Lattice::chain(n, 0.3 * pi));
  CHECK(fails);
  const auto map = condition_map(GreensModel::waveguide_2d(), {{4, 4}, {2, 2}}, {0.1 * pi, 0.2 * pi});
  CHECK(map.holds.size() == 2);
  CHECK(map.holds[0].size() == 2);
}

TEST_CASE("decay bound on small arrays") {
  const auto pts = decay_scaling(GreensModel::free_space(), {{2, 2}, {2, 3}, {4, 2}}, 0.42 * pi);
  REQUIRE(pts.size() == 3);
  for (const auto& p : pts) {
    CHECK(p.least_radiant_decay <= p.dimer_bound + 1e-10);
    CHECK(p.dimer_bound == doctest::Approx(p.sites / 2.0 * pair_rates(GreensModel::free_space(), 0.42 * pi).dimer));
  }
}
