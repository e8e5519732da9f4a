#include "dimerlab/linalg.hpp"

#include <lapacke.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dimerlab/errors.hpp"

namespace dimerlab::linalg {
namespace {

lapack_complex_double* lp(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

lapack_int as_int(Eigen::Index n) { return static_cast<lapack_int>(n); }

void check(lapack_int info, const char* routine) {
  if (info != 0) {
    throw SolverError(std::string(routine) + " failed with info = " + std::to_string(info));
  }
}

void require_square(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw ValidationError("matrix must be square");
}

}  // namespace

Eigen::VectorXcd eigenvalues(Eigen::MatrixXcd a) {
  require_square(a);
  const lapack_int n = as_int(a.rows());
  Eigen::VectorXcd w(n);
  cplx dummy;
  check(LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, lp(a.data()), n, lp(w.data()), lp(&dummy), 1,
                      lp(&dummy), 1),
        "zgeev");
  return w;
}

void eigensystem(Eigen::MatrixXcd a, Eigen::VectorXcd& values, Eigen::MatrixXcd& vectors) {
  require_square(a);
  const lapack_int n = as_int(a.rows());
  values.resize(n);
  vectors.resize(n, n);
  cplx dummy;
  check(LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, lp(a.data()), n, lp(values.data()),
                      lp(&dummy), 1, lp(vectors.data()), n),
        "zgeev");
  vectors.colwise().normalize();
}

void hermitian_eigensystem(Eigen::MatrixXcd a, Eigen::VectorXd& values, Eigen::MatrixXcd& vectors) {
  require_square(a);
  const lapack_int n = as_int(a.rows());
  values.resize(n);
  check(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, lp(a.data()), n, values.data()), "zheevd");
  vectors = std::move(a);
}

void hermitian_lowest(Eigen::MatrixXcd a, int count, Eigen::VectorXd& values,
                      Eigen::MatrixXcd& vectors) {
  require_square(a);
  const lapack_int n = as_int(a.rows());
  count = std::min<int>(count, static_cast<int>(n));
  Eigen::VectorXd w(n);
  vectors.resize(n, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(std::max(count, 1)));
  lapack_int found = 0;
  check(LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, lp(a.data()), n, 0.0, 0.0, 1, count,
                       0.0, &found, w.data(), lp(vectors.data()), n, support.data()),
        "zheevr");
  values = w.head(found);
}

double symmetric_smallest(Eigen::MatrixXd a) {
  const lapack_int n = as_int(a.rows());
  Eigen::VectorXd w(n);
  double z = 0.0;
  lapack_int found = 0;
  lapack_int support[2];
  check(LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'N', 'I', 'L', n, a.data(), n, 0.0, 0.0, 1, 1, 0.0,
                       &found, w.data(), &z, 1, support),
        "dsyevr");
  return w[0];
}

Eigen::VectorXcd inverse_iteration(const Eigen::MatrixXcd& a, cplx lambda,
                                   const Eigen::VectorXcd& start, int sweeps) {
  require_square(a);
  const lapack_int n = as_int(a.rows());
  // A tiny shift keeps the factorisation nonsingular for an exact eigenvalue.
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1.0);
  const cplx shift = lambda + cplx(1.0, 1.0) * (scale * 64.0 * std::numeric_limits<double>::epsilon());
  Eigen::MatrixXcd lu = a;
  lu.diagonal().array() -= shift;
  std::vector<lapack_int> piv(static_cast<std::size_t>(n));
  check(LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lp(lu.data()), n, piv.data()), "zgetrf");

  Eigen::VectorXcd x(n);
  for (lapack_int i = 0; i < n; ++i) {
    x[i] = cplx(1.0 + 0.01 * std::sin(1.0 + i), 0.3 * std::cos(2.0 * i));
  }
  x *= 1e-3 / x.norm();
  if (start.size() == n && start.norm() > 0.0) x += start / start.norm();
  x.normalize();
  for (int s = 0; s < sweeps; ++s) {
    check(LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, 1, lp(lu.data()), n, piv.data(), lp(x.data()), n),
          "zgetrs");
    const double nx = x.norm();
    if (!std::isfinite(nx) || nx == 0.0) throw SolverError("inverse iteration diverged");
    x /= nx;
  }
  return x;
}

Eigen::MatrixXcd triangular_sylvester(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                      Eigen::MatrixXcd c) {
  require_square(a);
  require_square(b);
  if (c.rows() != a.rows() || c.cols() != b.rows()) throw ValidationError("ztrsyl: shape mismatch");
  const lapack_int m = as_int(a.rows());
  const lapack_int n = as_int(b.rows());
  double scale = 1.0;
  Eigen::MatrixXcd aa = a;
  Eigen::MatrixXcd bb = b;
  // info == 1 only signals that close eigenvalues were perturbed.
  const lapack_int info = LAPACKE_ztrsyl(LAPACK_COL_MAJOR, 'N', 'C', -1, m, n, lp(aa.data()), m,
                                         lp(bb.data()), n, lp(c.data()), m, &scale);
  if (info != 1) check(info, "ztrsyl");
  if (scale != 1.0) c /= scale;
  return c;
}

}  // namespace dimerlab::linalg
