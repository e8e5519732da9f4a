#include "dimerlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dimerlab/errors.hpp"
#include "dimerlab/linalg.hpp"

namespace dimerlab {
namespace {

using SparseP = Eigen::SparseMatrix<cplx, Eigen::ColMajor, std::int64_t>;

constexpr Eigen::Index kBlockCap = 6000;

SymmetryDecomposition decompose(const EffectiveHamiltonian& h, const SpectralOptions& options) {
  if (h.dimension() > options.dense_cap) {
    throw CapacityError("dense eigensolver", h.dimension(), options.dense_cap);
  }
  if (options.use_symmetry && h.lattice) return symmetry_blocks(*h.lattice, h.basis);
  return trivial_blocks(h.basis);
}

Eigen::MatrixXcd dense_block(const EffectiveHamiltonian& h, const Eigen::SparseMatrix<double>& p) {
  if (p.cols() > kBlockCap) {
    throw CapacityError("dense symmetry block", static_cast<std::size_t>(p.cols()),
                        static_cast<std::size_t>(kBlockCap));
  }
  const SparseP pc = p.cast<cplx>();
  const SparseP hp = h.matrix * pc;
  return Eigen::MatrixXcd(SparseP(pc.transpose() * hp));
}

double relative_residual(const EffectiveHamiltonian& h, const Eigen::VectorXcd& v, cplx lambda) {
  const double hn = std::max(h.norm(), std::numeric_limits<double>::min());
  return (h.matrix * v - lambda * v).norm() / hn;
}

/// Hermitian lower bound on -2 Im <v|B|v> over unit v in a complex-symmetric block.
double decay_lower_bound(const Eigen::MatrixXcd& block) {
  return linalg::symmetric_smallest(-2.0 * block.imag());
}

}  // namespace

StateVector SpectrumResult::state(std::size_t s) const {
  const std::size_t raw = ordering_.at(s);
  auto it = std::upper_bound(blocks_.begin(), blocks_.end(), raw,
                             [](std::size_t r, const Block& b) { return r < b.offset; });
  const Block& b = *std::prev(it);
  const Eigen::VectorXcd local = b.vectors.col(static_cast<Eigen::Index>(raw - b.offset));
  Eigen::VectorXcd full = b.isometry->cast<cplx>() * local;
  StateVector psi(basis_, std::move(full));
  psi.normalize();
  return psi;
}

SpectrumResult eigendecompose(const EffectiveHamiltonian& h, const SpectralOptions& options) {
  const auto decomposition = decompose(h, options);
  SpectrumResult out;
  out.basis_ = h.basis;
  out.hermitian_ = h.hermitian;
  out.values_.resize(static_cast<Eigen::Index>(h.dimension()));
  const double hn = std::max(h.norm(), std::numeric_limits<double>::min());

  std::size_t offset = 0;
  for (const auto& block : decomposition.blocks) {
    const Eigen::MatrixXcd a = dense_block(h, block.isometry);
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;
    if (h.hermitian) {
      Eigen::VectorXd w;
      linalg::hermitian_eigensystem(a, w, vectors);
      values = w.cast<cplx>();
    } else {
      linalg::eigensystem(a, values, vectors);
    }
    const Eigen::MatrixXcd residual = a * vectors - vectors * values.asDiagonal();
    for (Eigen::Index k = 0; k < residual.cols(); ++k) {
      out.max_residual_ = std::max(out.max_residual_, residual.col(k).norm() / hn);
    }
    out.values_.segment(static_cast<Eigen::Index>(offset), values.size()) = values;
    out.blocks_.push_back({std::make_shared<const Eigen::SparseMatrix<double>>(block.isometry),
                           std::move(vectors), offset});
    offset += static_cast<std::size_t>(values.size());
  }
  if (out.max_residual_ > options.residual_tolerance) {
    throw SolverError("eigendecomposition residual above tolerance", out.max_residual_);
  }

  out.ordering_.resize(out.size());
  std::iota(out.ordering_.begin(), out.ordering_.end(), 0);
  const auto& v = out.values_;
  if (h.hermitian) {
    std::stable_sort(out.ordering_.begin(), out.ordering_.end(), [&](std::size_t a, std::size_t b) {
      return v[static_cast<Eigen::Index>(a)].real() < v[static_cast<Eigen::Index>(b)].real();
    });
  } else {
    std::stable_sort(out.ordering_.begin(), out.ordering_.end(), [&](std::size_t a, std::size_t b) {
      const double ga = decay_rate(v[static_cast<Eigen::Index>(a)]);
      const double gb = decay_rate(v[static_cast<Eigen::Index>(b)]);
      if (ga != gb) return ga < gb;
      return v[static_cast<Eigen::Index>(a)].real() < v[static_cast<Eigen::Index>(b)].real();
    });
  }
  return out;
}

LeastRadiantResult least_radiant(const EffectiveHamiltonian& h, const StateVector* reference,
                                 const SpectralOptions& options) {
  if (h.hermitian) throw UnsupportedError("least_radiant expects a dissipative Hamiltonian");
  if (reference && !(reference->basis == h.basis)) {
    throw ValidationError("reference state lives in a different sector");
  }
  const auto decomposition = decompose(h, options);
  const auto& blocks = decomposition.blocks;

  // Visit the blocks carrying most of the reference first so pruning bites early.
  std::vector<std::size_t> order(blocks.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> weight(blocks.size(), 0.0);
  if (reference) {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      weight[b] = (blocks[b].isometry.transpose().cast<cplx>() * reference->amplitudes).squaredNorm();
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return weight[a] > weight[b]; });
  }

  struct Candidate {
    std::size_t block;
    cplx value;
  };
  std::vector<Candidate> candidates;
  double best = std::numeric_limits<double>::infinity();
  LeastRadiantResult result{{}, 0.0, StateVector(h.basis, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(h.dimension()))),
                            0.0, 1, false, blocks.size(), 0};

  for (std::size_t b : order) {
    const Eigen::MatrixXcd a = dense_block(h, blocks[b].isometry);
    if (options.prune && std::isfinite(best) && decay_lower_bound(a) > best + options.tie_tolerance) {
      continue;
    }
    ++result.blocks_solved;
    const Eigen::VectorXcd values = linalg::eigenvalues(a);
    for (Eigen::Index k = 0; k < values.size(); ++k) {
      const double g = decay_rate(values[k]);
      if (g <= best + options.tie_tolerance) {
        best = std::min(best, g);
        candidates.push_back({b, values[k]});
      }
    }
    candidates.erase(std::remove_if(candidates.begin(), candidates.end(),
                                    [&](const Candidate& c) { return decay_rate(c.value) > best + options.tie_tolerance; }),
                     candidates.end());
  }
  if (candidates.empty()) throw SolverError("no eigenvalues found");

  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    const double gx = decay_rate(x.value), gy = decay_rate(y.value);
    if (gx != gy) return gx < gy;
    return x.value.real() < y.value.real();
  });
  result.degenerate_count = candidates.size();
  const std::size_t tried = reference ? std::min<std::size_t>(candidates.size(), 16) : 1;

  double best_overlap = -1.0;
  for (std::size_t c = 0; c < tried; ++c) {
    const auto& cand = candidates[c];
    const auto& p = blocks[cand.block].isometry;
    const Eigen::MatrixXcd a = dense_block(h, p);
    Eigen::VectorXcd start;
    if (reference) start = p.transpose().cast<cplx>() * reference->amplitudes;
    const Eigen::VectorXcd local = linalg::inverse_iteration(a, cand.value, start);
    StateVector psi(h.basis, p.cast<cplx>() * local);
    psi.normalize();
    const double overlap = reference ? fidelity(*reference, psi) : 0.0;
    if (c == 0 || overlap > best_overlap + 1e-12) {
      if (c > 0) result.tie_broken_by_reference = true;
      best_overlap = overlap;
      result.eigenvalue = cand.value;
      result.state = std::move(psi);
    }
  }
  result.decay = decay_rate(result.eigenvalue);
  result.state.canonicalize_phase();
  result.relative_residual = relative_residual(h, result.state.amplitudes, result.eigenvalue);
  if (result.relative_residual > options.residual_tolerance) {
    throw SolverError("least radiant eigenpair residual above tolerance", result.relative_residual);
  }
  return result;
}

GroundStateResult ground_state(const EffectiveHamiltonian& h, const StateVector* reference,
                               const SpectralOptions& options) {
  if (!h.hermitian) throw UnsupportedError("ground_state expects a Hermitian Hamiltonian");
  if (reference && !(reference->basis == h.basis)) {
    throw ValidationError("reference state lives in a different sector");
  }
  const auto decomposition = decompose(h, options);
  constexpr int kLowest = 4;

  struct Pair {
    double energy;
    Eigen::VectorXcd vector;
  };
  std::vector<Pair> pairs;
  for (const auto& block : decomposition.blocks) {
    const Eigen::MatrixXcd a = dense_block(h, block.isometry);
    Eigen::VectorXd w;
    Eigen::MatrixXcd v;
    linalg::hermitian_lowest(a, kLowest, w, v);
    const Eigen::MatrixXcd lifted = block.isometry.cast<cplx>() * v;
    for (Eigen::Index k = 0; k < w.size(); ++k) pairs.push_back({w[k], lifted.col(k)});
  }
  const double emin = std::min_element(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
                        return a.energy < b.energy;
                      })->energy;
  std::vector<const Pair*> lowest;
  for (const auto& p : pairs) {
    if (p.energy <= emin + options.tie_tolerance) lowest.push_back(&p);
  }

  Eigen::VectorXcd psi = lowest.front()->vector;
  if (reference && lowest.size() > 1) {
    // Degenerate Hermitian eigenvectors are orthonormal: project the reference.
    Eigen::VectorXcd proj = Eigen::VectorXcd::Zero(psi.size());
    for (const Pair* p : lowest) proj += p->vector * p->vector.dot(reference->amplitudes);
    if (proj.norm() > 1e-8) psi = proj;
  }
  GroundStateResult out{emin, StateVector(h.basis, std::move(psi)), 0.0, lowest.size()};
  out.state.normalize();
  out.state.canonicalize_phase();
  const double energy = (out.state.amplitudes.dot(h.matrix * out.state.amplitudes)).real();
  out.energy = energy;
  out.relative_residual = relative_residual(h, out.state.amplitudes, cplx(energy, 0.0));
  if (out.relative_residual > std::min(options.residual_tolerance, 1e-10)) {
    throw SolverError("ground state residual above tolerance", out.relative_residual);
  }
  return out;
}

PairRates pair_rates(const GreensModel& model, double argument) {
  if (!model.dissipative()) throw UnsupportedError("pair rates need a radiative kernel");
  const double im = greens_kernel(model, argument, false).imag();
  return {model.gamma + 2.0 * im, model.gamma - 2.0 * im};
}

bool dimerization_condition(const GreensModel& model, const Lattice& lattice) {
  if (!model.dissipative()) throw UnsupportedError("dimerization condition needs a radiative kernel");
  double nn_dimer = -std::numeric_limits<double>::infinity();
  double others = std::numeric_limits<double>::infinity();
  const int n = lattice.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto r = pair_rates(model, kernel_argument(model, lattice, i, j));
      others = std::min(others, r.triplet);
      if (lattice.are_neighbors(i, j)) {
        nn_dimer = std::max(nn_dimer, r.dimer);
      } else {
        others = std::min(others, r.dimer);
      }
    }
  }
  return nn_dimer < others;
}

ConditionMap condition_map(const GreensModel& model, const std::vector<std::pair<int, int>>& shapes,
                           const std::vector<double>& spacings) {
  ConditionMap map{shapes, spacings, {}};
  for (auto [nx, ny] : shapes) {
    std::vector<bool> row;
    row.reserve(spacings.size());
    for (double k0d : spacings) {
      const Lattice lat = ny == 1 ? Lattice::chain(nx, k0d) : Lattice::square(nx, ny, k0d);
      row.push_back(dimerization_condition(model, lat));
    }
    map.holds.push_back(std::move(row));
  }
  return map;
}

double fidelity(const StateVector& a, const StateVector& b) {
  return std::min(1.0, std::norm(inner_product(a, b)));
}

double infidelity_density(double fidelity, int sites) {
  if (sites < 1) throw DomainError("infidelity density needs at least one site");
  if (!(fidelity >= -1e-12 && fidelity <= 1.0 + 1e-12)) throw DomainError("fidelity outside [0, 1]");
  return (1.0 - std::clamp(fidelity, 0.0, 1.0)) / sites;
}

std::vector<DecayPoint> decay_scaling(const GreensModel& model,
                                      const std::vector<std::pair<int, int>>& shapes, double spacing,
                                      const SpectralOptions& options) {
  if (!model.dissipative()) throw UnsupportedError("decay scaling needs a radiative kernel");
  std::vector<DecayPoint> out;
  const double gamma_d = pair_rates(model, spacing).dimer;
  for (auto [nx, ny] : shapes) {
    const Lattice lat = ny == 1 ? Lattice::chain(nx, spacing) : Lattice::square(nx, ny, spacing);
    const SectorBasis basis(lat.size(), lat.size() / 2);
    const auto h = assemble_hamiltonian(lat, model, basis);
    const auto lr = least_radiant(h, nullptr, options);
    out.push_back({nx, ny, lat.size(), lr.decay, 0.5 * lat.size() * gamma_d});
  }
  return out;
}

}  // namespace dimerlab
