#include "dimerlab/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseLU>
#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "dimerlab/errors.hpp"
#include "dimerlab/linalg.hpp"
#include "dimerlab/observables.hpp"
#include "dimerlab/parallel.hpp"
#include "dimerlab/sector_basis.hpp"

namespace dimerlab {

using SpOp = Eigen::SparseMatrix<cplx>;
using Index = Eigen::Index;

namespace detail {

// Everything that does not depend on the detuning. Internally the 2^N basis
// is reordered so each excitation sector is a contiguous block (ascending
// excitation number, ascending words inside a sector).
struct LiouvillianData {
  int sites = 0;
  Index dim = 0;
  double rabi = 0.0;
  std::vector<Index> order;     // internal index -> occupation word
  std::vector<Index> offset;    // sector n occupies [offset[n], offset[n+1])
  std::vector<Eigen::MatrixXcd> h;         // H_eff on sector n
  Eigen::MatrixXd gamma;
  std::vector<SpOp> lower;     // s-_i
  std::vector<std::vector<Index>> raised;  // index of word | bit i, or -1 if bit i is set
  std::vector<SpOp> collapse;  // sum_j Gamma_ij s-_j
  SpOp drive;                  // sum_i p_i (s+_i + s-_i), without Omega

  Index sector_size(int n) const { return offset[static_cast<std::size_t>(n) + 1] - offset[static_cast<std::size_t>(n)]; }
  Index sector_start(int n) const { return offset[static_cast<std::size_t>(n)]; }
};

}  // namespace detail

namespace {

using detail::LiouvillianData;

double frob(const Eigen::MatrixXcd& m) { return m.norm(); }

cplx hs_inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a.conjugate().cwiseProduct(b)).sum();
}

std::shared_ptr<const LiouvillianData> build_data(const Eigen::MatrixXcd& coupling, const DriveSpec& drive) {
  auto d = std::make_shared<LiouvillianData>();
  const auto n = static_cast<int>(coupling.rows());
  d->sites = n;
  d->dim = Index{1} << n;
  d->rabi = drive.rabi;
  d->gamma = -coupling.imag();

  std::vector<Index> position(static_cast<std::size_t>(d->dim));
  d->offset.push_back(0);
  for (int k = 0; k <= n; ++k) {
    const SectorBasis basis(n, k, std::numeric_limits<std::size_t>::max());
    for (std::uint64_t w : basis.configs()) {
      position[w] = static_cast<Index>(d->order.size());
      d->order.push_back(static_cast<Index>(w));
    }
    d->offset.push_back(static_cast<Index>(d->order.size()));
    Eigen::MatrixXcd hk = assemble_hamiltonian(coupling, basis, false).to_dense(std::numeric_limits<std::size_t>::max());
    d->h.push_back(std::move(hk));
  }

  std::vector<SpOp> lower;
  for (int i = 0; i < n; ++i) {
    std::vector<Eigen::Triplet<cplx>> t;
    for (Index b = 0; b < d->dim; ++b) {
      const auto w = static_cast<std::uint64_t>(d->order[static_cast<std::size_t>(b)]);
      if ((w >> i) & 1U) t.emplace_back(position[w ^ (std::uint64_t{1} << i)], b, 1.0);
    }
    SpOp s(d->dim, d->dim);
    s.setFromTriplets(t.begin(), t.end());
    lower.push_back(std::move(s));
    std::vector<Index> up(static_cast<std::size_t>(d->dim), -1);
    for (Index a = 0; a < d->dim; ++a) {
      const auto w = static_cast<std::uint64_t>(d->order[static_cast<std::size_t>(a)]);
      if (!((w >> i) & 1U)) up[static_cast<std::size_t>(a)] = position[w | (std::uint64_t{1} << i)];
    }
    d->raised.push_back(std::move(up));
  }
  SpOp drive_op(d->dim, d->dim);
  for (int i = 0; i < n; ++i) {
    SpOp c(d->dim, d->dim);
    for (int j = 0; j < n; ++j) c += cplx(d->gamma(i, j), 0.0) * lower[static_cast<std::size_t>(j)];
    c.prune(cplx(0.0, 0.0));
    d->collapse.push_back(std::move(c));
    const SpOp& s = lower[static_cast<std::size_t>(i)];
    drive_op += cplx(drive.pattern[static_cast<std::size_t>(i)], 0.0) * (s + SpOp(s.transpose()));
  }
  d->drive = std::move(drive_op);
  d->lower = std::move(lower);
  return d;
}

struct SingularSystem {};

Eigen::MatrixXcd internal_ground(const LiouvillianData& d) {
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(d.dim, d.dim);
  g(0, 0) = 1.0;  // the empty word is the first internal index
  return g;
}

// Exact inverse of P = N + u <1|, where N(Y) = -i (H Y - Y H^H) is the
// no-jump part of L (drive included) and u the ground projector. N is a
// Sylvester operator, solved in the Schur basis of H; the border is added by
// Sherman-Morrison. What is left of L is the jump term, which only lowers
// excitation numbers, so A P^-1 stays close to the identity.
class NoJumpSolver {
 public:
  NoJumpSolver(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& u) {
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(h);
    if (schur.info() != Eigen::Success) throw SingularSystem{};
    u_ = schur.matrixU();
    t_ = schur.matrixT();
    z_ = inverse_n(u);
    denom_ = 1.0 + z_.trace();
    if (!z_.allFinite() || std::abs(denom_) < 1e-300) throw SingularSystem{};
  }

  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& r) const {
    Eigen::MatrixXcd x = inverse_n(r);
    x -= (x.trace() / denom_) * z_;
    return x;
  }

 private:
  // -i (H Y - Y H^H) = R  <=>  T Z - Z T^H = i U^H R U,  Y = U Z U^H
  Eigen::MatrixXcd inverse_n(const Eigen::MatrixXcd& r) const {
    const Eigen::MatrixXcd c = cplx(0.0, 1.0) * (u_.adjoint() * r * u_);
    return u_ * linalg::triangular_sylvester(t_, t_, c) * u_.adjoint();
  }

  Eigen::MatrixXcd u_, t_, z_;
  cplx denom_;
};

// Restarted GMRES, right preconditioned, on the bordered operator
// A x = L(x) + u tr(x) with right-hand side u.
struct KrylovOutcome {
  Eigen::MatrixXcd x;
  int iterations = 0;
  bool converged = false;
};

KrylovOutcome bordered_gmres(const Liouvillian& l, double abs_tol, int restart, int max_iterations) {
  const LiouvillianData& d = l.data();
  const Eigen::MatrixXcd u = internal_ground(d);
  const NoJumpSolver pre(l.to_internal(l.hamiltonian()), u);
  auto apply_a = [&](const Eigen::MatrixXcd& x) {
    Eigen::MatrixXcd y = l.apply_internal(x);
    y(0, 0) += x.trace();
    return y;
  };

  KrylovOutcome out;
  out.x = pre.solve(u);
  const int m = std::max(2, restart);
  while (out.iterations < max_iterations) {
    Eigen::MatrixXcd r = u - apply_a(out.x);
    const double beta = frob(r);
    if (beta <= abs_tol) {
      out.converged = true;
      break;
    }
    std::vector<Eigen::MatrixXcd> v;
    v.reserve(static_cast<std::size_t>(m) + 1);
    v.push_back(r / beta);
    Eigen::MatrixXcd hess = Eigen::MatrixXcd::Zero(m + 1, m);
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(m + 1);
    g(0) = beta;
    std::vector<double> cs(static_cast<std::size_t>(m));
    std::vector<cplx> sn(static_cast<std::size_t>(m));
    int k = 0;
    for (; k < m && out.iterations < max_iterations; ++k) {
      ++out.iterations;
      Eigen::MatrixXcd w = apply_a(pre.solve(v[static_cast<std::size_t>(k)]));
      // Modified Gram-Schmidt, two passes.
      for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j <= k; ++j) {
          const cplx hij = hs_inner(v[static_cast<std::size_t>(j)], w);
          hess(j, k) += hij;
          w -= hij * v[static_cast<std::size_t>(j)];
        }
      }
      const double hnext = frob(w);
      hess(k + 1, k) = hnext;
      for (int j = 0; j < k; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        const cplx a = hess(j, k);
        const cplx b = hess(j + 1, k);
        hess(j, k) = cs[sj] * a + sn[sj] * b;
        hess(j + 1, k) = -std::conj(sn[sj]) * a + cs[sj] * b;
      }
      const cplx a = hess(k, k);
      const double b = hnext;
      const double rho = std::hypot(std::abs(a), b);
      const auto sk = static_cast<std::size_t>(k);
      if (rho == 0.0) {
        cs[sk] = 1.0;
        sn[sk] = 0.0;
      } else if (std::abs(a) == 0.0) {
        cs[sk] = 0.0;
        sn[sk] = 1.0;
      } else {
        cs[sk] = std::abs(a) / rho;
        sn[sk] = (a / std::abs(a)) * b / rho;
      }
      hess(k, k) = cs[sk] * a + sn[sk] * b;
      hess(k + 1, k) = 0.0;
      g(k + 1) = -std::conj(sn[sk]) * g(k);
      g(k) = cs[sk] * g(k);
      if (hnext > 0.0) v.push_back(w / hnext);
      if (std::abs(g(k + 1)) <= abs_tol || hnext == 0.0) {
        ++k;
        break;
      }
    }
    const Eigen::VectorXcd coef =
        hess.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    Eigen::MatrixXcd update = Eigen::MatrixXcd::Zero(d.dim, d.dim);
    for (int j = 0; j < k; ++j) update += coef(j) * v[static_cast<std::size_t>(j)];
    out.x += pre.solve(update);
  }
  return out;
}

Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& rho) {
  Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
  const cplx tr = h.trace();
  if (std::abs(tr) < 1e-300) throw SolverError("steady state has zero trace");
  return h / tr.real();
}

using OdeState = std::vector<cplx>;

struct OdeSystem {
  const Liouvillian* l;
  void operator()(const OdeState& x, OdeState& dxdt, double /*t*/) const {
    const Index dim = l->hilbert_dimension();
    const Eigen::Map<const Eigen::MatrixXcd> rho(x.data(), dim, dim);
    const Eigen::MatrixXcd out = l->apply_internal(rho);
    dxdt.assign(out.data(), out.data() + out.size());
  }
};

void hermitize_in_place(OdeState& x, Index dim) {
  Eigen::Map<Eigen::MatrixXcd> rho(x.data(), dim, dim);
  const Eigen::MatrixXcd h = 0.5 * (rho + rho.adjoint());
  rho = h;
}

namespace odeint = boost::numeric::odeint;
using OdeStepper = odeint::runge_kutta_cash_karp54<OdeState>;

// Advances x from t to t_end with an adaptive controlled stepper; `dt` carries
// the step size between calls. `after_step` may stop the integration early.
template <typename AfterStep>
double integrate_to(const Liouvillian& l, OdeState& x, double t, double t_end, double& dt,
                    const EvolveOptions& options, AfterStep&& after_step) {
  auto stepper = odeint::make_controlled<OdeStepper>(options.abs_tolerance, options.rel_tolerance);
  const OdeSystem system{&l};
  const Index dim = l.hilbert_dimension();
  while (t < t_end) {
    double step = std::min(dt, t_end - t);
    const bool last = step >= t_end - t;
    if (stepper.try_step(system, x, t, step) == odeint::success) {
      if (last) t = t_end;
      hermitize_in_place(x, dim);
      dt = step;
      if (after_step(x, t)) return t;
    } else {
      dt = step;
      if (dt < options.min_step) throw SolverError("time integration step size underflow");
    }
  }
  return t;
}

SteadyStateResult finish(const Liouvillian& l, Eigen::MatrixXcd rho_internal, SteadyStateMethod method,
                         int iterations, const SteadyStateOptions& options) {
  SteadyStateResult out;
  const Eigen::MatrixXcd rho = hermitize(rho_internal);
  out.liouvillian_norm = l.norm_estimate();
  out.residual = frob(l.apply_internal(rho));
  out.relative_residual = out.residual / out.liouvillian_norm;
  out.method = method;
  out.iterations = iterations;
  out.rho = l.to_external(rho);
  if (!(out.relative_residual <= options.tolerance)) {
    throw SolverError("steady state residual " + std::to_string(out.relative_residual) +
                          " above tolerance via " + std::string(to_string(method)),
                      out.relative_residual);
  }
  return out;
}

void check_multiplicity(const Liouvillian& l) {
  const Eigen::MatrixXcd dense = Eigen::MatrixXcd(l.superoperator());
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(dense, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double threshold = 1e-9 * s(0);
  std::vector<Eigen::MatrixXcd> candidates;
  const Index dim = l.hilbert_dimension();
  for (Index k = s.size() - 1; k >= 0 && s(k) <= threshold; --k) {
    Eigen::VectorXcd v = svd.matrixV().col(k);
    Eigen::MatrixXcd rho = Eigen::Map<Eigen::MatrixXcd>(v.data(), dim, dim);
    const cplx tr = rho.trace();
    rho /= std::abs(tr) > 1e-8 ? tr : cplx(rho.norm(), 0.0);
    candidates.push_back(std::move(rho));
  }
  if (candidates.size() > 1) {
    throw MultiplicityError("steady state is not unique: null space dimension " +
                                std::to_string(candidates.size()),
                            std::move(candidates));
  }
}

Eigen::MatrixXcd direct_solve(const Liouvillian& l) {
  using Sparse = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;
  Sparse a(l.superoperator());
  const Index dim = l.hilbert_dimension();
  // Border: add tr(rho) to the equation of the ground population.
  Sparse border(a.rows(), a.cols());
  std::vector<Eigen::Triplet<cplx>> t;
  for (Index k = 0; k < dim; ++k) t.emplace_back(0, static_cast<int>(k * (dim + 1)), 1.0);
  border.setFromTriplets(t.begin(), t.end());
  a += border;
  a.makeCompressed();
  Eigen::SparseLU<Sparse, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) throw SingularSystem{};
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(a.rows());
  b(0) = 1.0;
  Eigen::VectorXcd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw SingularSystem{};
  x += lu.solve(Eigen::VectorXcd(b - a * x));
  const Eigen::MatrixXcd rho = Eigen::Map<Eigen::MatrixXcd>(x.data(), dim, dim);
  return l.to_internal(rho);
}

std::pair<Eigen::MatrixXcd, int> relax(const Liouvillian& l, const SteadyStateOptions& options) {
  const Index dim = l.hilbert_dimension();
  const Eigen::MatrixXcd g = internal_ground(l.data());
  OdeState x(g.data(), g.data() + g.size());
  const double target = 0.1 * options.tolerance * l.norm_estimate();
  double dt = 1e-2;
  int steps = 0;
  bool done = false;
  EvolveOptions eo;
  eo.abs_tolerance = 1e-14;
  eo.rel_tolerance = 1e-12;
  integrate_to(l, x, 0.0, options.integration_time_cap, dt, eo, [&](OdeState& state, double) {
    ++steps;
    if (steps % 10 != 0) return false;
    const Eigen::Map<const Eigen::MatrixXcd> rho(state.data(), dim, dim);
    done = frob(l.apply_internal(rho)) <= target;
    return done;
  });
  if (!done) throw SolverError("integration did not reach a steady state within the time cap");
  return {Eigen::Map<Eigen::MatrixXcd>(x.data(), dim, dim), steps};
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(DrivePattern pattern) {
  switch (pattern) {
    case DrivePattern::Checkerboard: return "checkerboard";
    case DrivePattern::RowStaggered: return "row_staggered";
    case DrivePattern::Uniform: return "uniform";
  }
  return "?";
}

DrivePattern drive_pattern_from_string(std::string_view name) {
  if (name == "checkerboard") return DrivePattern::Checkerboard;
  if (name == "row_staggered") return DrivePattern::RowStaggered;
  if (name == "uniform") return DrivePattern::Uniform;
  throw ValidationError("unknown drive pattern '" + std::string(name) + "'");
}

std::vector<int> drive_signs(const Lattice& lattice, DrivePattern pattern) {
  std::vector<int> p(static_cast<std::size_t>(lattice.size()));
  for (int i = 0; i < lattice.size(); ++i) {
    int sign = 1;
    if (pattern == DrivePattern::Checkerboard) sign = lattice.on_sublattice_a(i) ? 1 : -1;
    if (pattern == DrivePattern::RowStaggered) sign = lattice.iy(i) % 2 == 0 ? 1 : -1;
    p[static_cast<std::size_t>(i)] = sign;
  }
  return p;
}

DriveSpec DriveSpec::make(const Lattice& lattice, double rabi, double detuning, DrivePattern pattern) {
  return {rabi, detuning, drive_signs(lattice, pattern)};
}

void DriveSpec::validate(int sites) const {
  if (!std::isfinite(rabi) || rabi < 0.0) throw ValidationError("Rabi frequency must be finite and >= 0");
  if (!std::isfinite(detuning)) throw ValidationError("detuning must be finite");
  if (static_cast<int>(pattern.size()) != sites) throw ValidationError("drive pattern length != number of sites");
  for (int p : pattern) {
    if (p != 1 && p != -1) throw ValidationError("drive pattern entries must be +1 or -1");
  }
}

Liouvillian::Liouvillian(const Lattice& lattice, const GreensModel& model, const DriveSpec& drive) {
  model.validate();
  if (!model.dissipative()) throw UnsupportedError("the band-gap kernel has no Liouvillian dynamics");
  if (lattice.size() > kLiouvillianSiteCap) {
    throw CapacityError("Liouvillian sites", static_cast<std::size_t>(lattice.size()), kLiouvillianSiteCap);
  }
  *this = Liouvillian(coupling_matrix(lattice, model), drive);
}

Liouvillian::Liouvillian(const Eigen::MatrixXcd& coupling, const DriveSpec& drive) : drive_(drive) {
  const Index n = coupling.rows();
  if (n < 1 || coupling.cols() != n) throw ValidationError("coupling matrix must be square and nonempty");
  if (n > kLiouvillianSiteCap) {
    throw CapacityError("Liouvillian sites", static_cast<std::size_t>(n), kLiouvillianSiteCap);
  }
  if (!coupling.allFinite() || (coupling - coupling.transpose()).norm() > 1e-12 * (1.0 + coupling.norm())) {
    throw ValidationError("coupling matrix must be finite and symmetric");
  }
  drive.validate(static_cast<int>(n));
  data_ = build_data(coupling, drive);
}

Liouvillian::Liouvillian(DriveSpec drive, std::shared_ptr<const detail::LiouvillianData> data)
    : drive_(std::move(drive)), data_(std::move(data)) {}

int Liouvillian::sites() const noexcept { return data_->sites; }
Index Liouvillian::hilbert_dimension() const noexcept { return data_->dim; }

Liouvillian Liouvillian::with_detuning(double detuning) const {
  DriveSpec d = drive_;
  d.detuning = detuning;
  d.validate(sites());
  return Liouvillian(std::move(d), data_);
}

Eigen::MatrixXcd Liouvillian::left_hamiltonian(const Eigen::MatrixXcd& x) const {
  const auto& d = *data_;
  Eigen::MatrixXcd out(d.dim, x.cols());
  for (int n = 0; n <= d.sites; ++n) {
    const Index r = d.sector_start(n);
    const Index m = d.sector_size(n);
    out.middleRows(r, m).noalias() = d.h[static_cast<std::size_t>(n)] * x.middleRows(r, m);
    out.middleRows(r, m) -= (drive_.detuning * n) * x.middleRows(r, m);
  }
  if (d.rabi != 0.0) out += d.rabi * (d.drive * x);
  return out;
}

Eigen::MatrixXcd Liouvillian::apply_internal(const Eigen::MatrixXcd& rho) const {
  const auto& d = *data_;
  const cplx mi(0.0, -1.0);
  Eigen::MatrixXcd out = mi * (left_hamiltonian(rho) - left_hamiltonian(rho.adjoint()).adjoint());
  // Jump term 2 sum_ij Gamma_ij s-_i rho s+_j, by index gathers:
  // (rho s+_j)(:, b) = rho(:, b | j) and (s-_i y)(a, :) = y(a | i, :).
  const Index dim = d.dim;
  std::vector<Eigen::MatrixXcd> cols(static_cast<std::size_t>(d.sites));
  for (int j = 0; j < d.sites; ++j) {
    const auto& up = d.raised[static_cast<std::size_t>(j)];
    Eigen::MatrixXcd& x = cols[static_cast<std::size_t>(j)];
    x.setZero(dim, dim);
    for (Index b = 0; b < dim; ++b) {
      if (up[static_cast<std::size_t>(b)] >= 0) x.col(b) = rho.col(up[static_cast<std::size_t>(b)]);
    }
  }
  Eigen::MatrixXcd y(dim, dim);
  for (int i = 0; i < d.sites; ++i) {
    y.setZero();
    for (int j = 0; j < d.sites; ++j) {
      const double g = d.gamma(i, j);
      if (g != 0.0) y += (2.0 * g) * cols[static_cast<std::size_t>(j)];
    }
    const auto& up = d.raised[static_cast<std::size_t>(i)];
    for (Index a = 0; a < dim; ++a) {
      if (up[static_cast<std::size_t>(a)] >= 0) out.row(a) += y.row(up[static_cast<std::size_t>(a)]);
    }
  }
  return out;
}

Eigen::MatrixXcd Liouvillian::apply_adjoint_internal(const Eigen::MatrixXcd& x) const {
  const auto& d = *data_;
  // H^H x, block by block.
  auto left_adjoint = [&](const Eigen::MatrixXcd& y) {
    Eigen::MatrixXcd out(d.dim, y.cols());
    for (int n = 0; n <= d.sites; ++n) {
      const Index r = d.sector_start(n);
      const Index m = d.sector_size(n);
      out.middleRows(r, m).noalias() = d.h[static_cast<std::size_t>(n)].adjoint() * y.middleRows(r, m);
      out.middleRows(r, m) -= (drive_.detuning * n) * y.middleRows(r, m);
    }
    if (d.rabi != 0.0) out += d.rabi * (d.drive * y);
    return out;
  };
  const cplx pi(0.0, 1.0);
  Eigen::MatrixXcd out = pi * (left_adjoint(x) - left_adjoint(x.adjoint()).adjoint());
  // 2 sum_ij Gamma_ij s+_i x s-_j, the transpose of the gathers in apply_internal.
  const Index dim = d.dim;
  std::vector<Eigen::MatrixXcd> cols(static_cast<std::size_t>(d.sites));
  for (int j = 0; j < d.sites; ++j) {
    const auto& up = d.raised[static_cast<std::size_t>(j)];
    Eigen::MatrixXcd& c = cols[static_cast<std::size_t>(j)];
    c.setZero(dim, dim);
    for (Index b = 0; b < dim; ++b) {
      if (up[static_cast<std::size_t>(b)] >= 0) c.col(up[static_cast<std::size_t>(b)]) = x.col(b);
    }
  }
  Eigen::MatrixXcd y(dim, dim);
  for (int i = 0; i < d.sites; ++i) {
    y.setZero();
    for (int j = 0; j < d.sites; ++j) {
      const double g = d.gamma(i, j);
      if (g != 0.0) y += (2.0 * g) * cols[static_cast<std::size_t>(j)];
    }
    const auto& up = d.raised[static_cast<std::size_t>(i)];
    for (Index a = 0; a < dim; ++a) {
      if (up[static_cast<std::size_t>(a)] >= 0) out.row(up[static_cast<std::size_t>(a)]) += y.row(a);
    }
  }
  return out;
}

Eigen::MatrixXcd Liouvillian::to_internal(const Eigen::MatrixXcd& rho) const {
  const auto& d = *data_;
  if (rho.rows() != d.dim || rho.cols() != d.dim) throw ValidationError("density matrix has the wrong dimension");
  return rho(d.order, d.order);
}

Eigen::MatrixXcd Liouvillian::to_external(const Eigen::MatrixXcd& rho) const {
  const auto& d = *data_;
  Eigen::MatrixXcd out(d.dim, d.dim);
  out(d.order, d.order) = rho;
  return out;
}

Eigen::MatrixXcd Liouvillian::apply(const Eigen::MatrixXcd& rho) const {
  return to_external(apply_internal(to_internal(rho)));
}

Eigen::MatrixXcd Liouvillian::apply_adjoint(const Eigen::MatrixXcd& x) const {
  return to_external(apply_adjoint_internal(to_internal(x)));
}

Eigen::MatrixXcd Liouvillian::hamiltonian() const {
  const Eigen::MatrixXcd internal = left_hamiltonian(Eigen::MatrixXcd::Identity(data_->dim, data_->dim));
  return to_external(internal);
}

SparseMatrixXcd Liouvillian::superoperator() const {
  const auto& d = *data_;
  if (d.sites > kSuperoperatorSiteCap) {
    throw CapacityError("explicit superoperator sites", static_cast<std::size_t>(d.sites),
                        kSuperoperatorSiteCap);
  }
  // Permutation to the computational basis: P e_internal = e_word.
  SpOp perm(d.dim, d.dim);
  {
    std::vector<Eigen::Triplet<cplx>> t;
    for (Index a = 0; a < d.dim; ++a) t.emplace_back(d.order[static_cast<std::size_t>(a)], a, 1.0);
    perm.setFromTriplets(t.begin(), t.end());
  }
  const SpOp perm_t = perm.transpose();
  SpOp h(d.dim, d.dim);
  {
    std::vector<Eigen::Triplet<cplx>> t;
    for (int n = 0; n <= d.sites; ++n) {
      const Index r = d.sector_start(n);
      const Eigen::MatrixXcd& hn = d.h[static_cast<std::size_t>(n)];
      for (Index a = 0; a < hn.rows(); ++a) {
        for (Index b = 0; b < hn.cols(); ++b) {
          cplx v = hn(a, b);
          if (a == b) v -= drive_.detuning * n;
          if (v != cplx(0.0, 0.0)) t.emplace_back(r + a, r + b, v);
        }
      }
    }
    h.setFromTriplets(t.begin(), t.end());
    if (d.rabi != 0.0) h += d.rabi * d.drive;
    h = perm * h * perm_t;
  }
  SpOp id(d.dim, d.dim);
  id.setIdentity();
  const SpOp h_conj = h.conjugate();
  SpOp l = cplx(0.0, -1.0) * (SpOp(Eigen::kroneckerProduct(id, h)) - SpOp(Eigen::kroneckerProduct(h_conj, id)));
  for (int i = 0; i < d.sites; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const SpOp s = perm * d.lower[k] * perm_t;
    const SpOp c = perm * d.collapse[k] * perm_t;
    l += 2.0 * SpOp(Eigen::kroneckerProduct(c, s));
  }
  l.prune(cplx(0.0, 0.0));
  return SparseMatrixXcd(l);
}

double Liouvillian::norm_estimate() const {
  if (norm_) return *norm_;
  const auto& d = *data_;
  Eigen::MatrixXcd x(d.dim, d.dim);
  for (Index c = 0; c < d.dim; ++c) {
    for (Index r = 0; r < d.dim; ++r) {
      x(r, c) = std::polar(1.0, 0.7 * static_cast<double>(r) + 1.3 * static_cast<double>(c) + 0.1 * static_cast<double>(r * c));
    }
  }
  x /= x.norm();
  double estimate = 0.0;
  for (int it = 0; it < 60; ++it) {
    const Eigen::MatrixXcd y = apply_adjoint_internal(apply_internal(x));
    const double ny = y.norm();
    if (ny == 0.0) break;
    const double next = std::sqrt(ny);
    x = y / ny;
    const bool settled = std::abs(next - estimate) <= 1e-4 * next;
    estimate = next;
    if (settled) break;
  }
  norm_ = estimate;
  return estimate;
}

std::string_view to_string(SteadyStateMethod method) {
  switch (method) {
    case SteadyStateMethod::Auto: return "auto";
    case SteadyStateMethod::Direct: return "direct";
    case SteadyStateMethod::Krylov: return "krylov";
    case SteadyStateMethod::Integration: return "integration";
  }
  return "?";
}

SteadyStateMethod steady_state_method_from_string(std::string_view name) {
  if (name == "auto") return SteadyStateMethod::Auto;
  if (name == "direct") return SteadyStateMethod::Direct;
  if (name == "krylov") return SteadyStateMethod::Krylov;
  if (name == "integration") return SteadyStateMethod::Integration;
  throw ValidationError("unknown steady-state method '" + std::string(name) + "'");
}

SteadyStateResult steady_state(const Liouvillian& l, const SteadyStateOptions& options) {
  if (!(options.tolerance > 0.0)) throw ValidationError("steady-state tolerance must be positive");
  const int n = l.sites();
  if (n <= options.multiplicity_site_cap) check_multiplicity(l);

  SteadyStateMethod method = options.method;
  if (method == SteadyStateMethod::Auto) {
    method = n <= std::min(options.direct_site_cap, kSuperoperatorSiteCap) ? SteadyStateMethod::Direct
                                                                          : SteadyStateMethod::Krylov;
  }
  // Undriven: everything decays to the ground state.
  if (l.drive().rabi == 0.0) return finish(l, internal_ground(l.data()), method, 0, options);
  if (method == SteadyStateMethod::Direct) {
    try {
      return finish(l, direct_solve(l), method, 1, options);
    } catch (const SingularSystem&) {
      method = SteadyStateMethod::Integration;
    }
  }
  if (method == SteadyStateMethod::Krylov) {
    const double abs_tol = 1e-2 * options.tolerance * l.norm_estimate();
    try {
      KrylovOutcome k = bordered_gmres(l, abs_tol, options.krylov_restart, options.krylov_max_iterations);
      if (k.converged) return finish(l, std::move(k.x), method, k.iterations, options);
    } catch (const SingularSystem&) {
    }
    method = SteadyStateMethod::Integration;
  }
  auto [rho, steps] = relax(l, options);
  return finish(l, std::move(rho), SteadyStateMethod::Integration, steps, options);
}

Eigen::MatrixXcd ground_projector(int sites) {
  if (sites < 1 || sites > kLiouvillianSiteCap) throw ValidationError("site count out of range");
  const Index dim = Index{1} << sites;
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(dim, dim);
  g(0, 0) = 1.0;
  return g;
}

void validate_density_matrix(const Eigen::MatrixXcd& rho, double tolerance) {
  if (rho.rows() != rho.cols() || rho.rows() == 0 || !std::has_single_bit(static_cast<std::uint64_t>(rho.rows()))) {
    throw DomainError("density matrix must be square with power-of-two dimension");
  }
  if ((rho - rho.adjoint()).norm() > tolerance) throw DomainError("density matrix is not Hermitian");
  if (std::abs(rho.trace() - cplx(1.0, 0.0)) > tolerance) throw DomainError("density matrix trace != 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tolerance) throw DomainError("density matrix is not positive semidefinite");
}

Trajectory time_evolve(const Liouvillian& l, const Eigen::MatrixXcd& rho0, const std::vector<double>& times,
                       const EvolveOptions& options) {
  validate_density_matrix(rho0);
  if (rho0.rows() != l.hilbert_dimension()) throw ValidationError("initial state dimension mismatch");
  if (times.empty()) throw ValidationError("time grid is empty");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k]) || times[k] < 0.0 || (k > 0 && times[k] < times[k - 1])) {
      throw ValidationError("time grid must be finite, nonnegative and ascending");
    }
  }
  const Index dim = l.hilbert_dimension();
  const Eigen::MatrixXcd start = l.to_internal(rho0);
  OdeState x(start.data(), start.data() + start.size());
  Trajectory out;
  double t = 0.0;
  double dt = options.initial_step;
  for (double target : times) {
    t = integrate_to(l, x, t, target, dt, options, [](OdeState&, double) { return false; });
    const Eigen::Map<const Eigen::MatrixXcd> rho(x.data(), dim, dim);
    out.times.push_back(target);
    out.states.push_back(l.to_external(rho));
  }
  return out;
}

DetuningSweep detuning_sweep(const Lattice& lattice, const GreensModel& model, double rabi,
                             const std::vector<int>& pattern, const std::vector<double>& detunings,
                             const StateVector& target, cplx target_energy,
                             const SteadyStateOptions& options) {
  if (target.basis.sites() != lattice.size()) throw ValidationError("target state is on a different lattice");
  if (detunings.empty()) throw ValidationError("detuning grid is empty");
  for (double delta : detunings) {
    if (!std::isfinite(delta)) throw ValidationError("detuning grid must be finite");
  }
  const Liouvillian base(lattice, model, DriveSpec{rabi, detunings.front(), pattern});
  const Eigen::VectorXcd phi = target.embed() / target.norm();

  DetuningSweep sweep;
  sweep.target_energy = target_energy;
  sweep.marker_energy = target_energy.real();
  sweep.marker_per_excitation = 2.0 * target_energy.real() / lattice.size();
  sweep.points.resize(detunings.size());
  std::vector<double> norms(detunings.size());
  parallel_for(detunings.size(), [&](std::size_t k) {
    const Liouvillian l = base.with_detuning(detunings[k]);
    const SteadyStateResult ss = steady_state(l, options);
    SweepPoint& p = sweep.points[k];
    p.detuning = detunings[k];
    p.fidelity = std::clamp(phi.dot(ss.rho * phi).real(), 0.0, 1.0);
    p.concurrence = avg_nn_concurrence(ss.rho, lattice);
    p.relative_residual = ss.relative_residual;
    p.method = ss.method;
    p.iterations = ss.iterations;
    norms[k] = ss.liouvillian_norm;
  });
  sweep.liouvillian_norm = *std::min_element(norms.begin(), norms.end());
  return sweep;
}

}  // namespace dimerlab
