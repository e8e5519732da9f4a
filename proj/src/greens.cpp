#include "dimerlab/greens.hpp"

#include <cmath>

#include "dimerlab/errors.hpp"

namespace dimerlab {

std::string_view to_string(Kernel kernel) {
  switch (kernel) {
    case Kernel::Waveguide1D: return "waveguide1d";
    case Kernel::Waveguide2D: return "waveguide2d";
    case Kernel::FreeSpace2D: return "freespace2d";
    case Kernel::BandGap2D: return "bandgap2d";
  }
  return "unknown";
}

Kernel kernel_from_string(std::string_view name) {
  if (name == "waveguide1d") return Kernel::Waveguide1D;
  if (name == "waveguide2d") return Kernel::Waveguide2D;
  if (name == "freespace2d") return Kernel::FreeSpace2D;
  if (name == "bandgap2d") return Kernel::BandGap2D;
  throw ValidationError("unknown kernel '" + std::string(name) +
                        "' (expected waveguide1d, waveguide2d, freespace2d or bandgap2d)");
}

void GreensModel::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be positive");
  if (kernel == Kernel::BandGap2D) {
    if (!(coupling > 0.0) || !std::isfinite(coupling)) {
      throw ValidationError("band-gap coupling J must be positive");
    }
    if (!(localization > 0.0) || !std::isfinite(localization)) {
      throw ValidationError("band-gap localization xi must be positive");
    }
  }
}

namespace special {
// libstdc++ provides the C++17 mathematical special functions; accuracy is
// checked in the unit tests against quadrature representations.
double bessel_j0(double x) { return std::cyl_bessel_j(0.0, x); }
double bessel_y0(double x) { return std::cyl_neumann(0.0, x); }
double bessel_k0(double x) { return std::cyl_bessel_k(0.0, x); }
}  // namespace special

cplx greens_kernel(const GreensModel& model, double argument, bool diagonal) {
  const double g = model.gamma;
  if (diagonal) {
    if (model.kernel == Kernel::BandGap2D) return {0.0, 0.0};
    return {0.0, -0.5 * g};
  }
  if (!(argument >= 0.0) || !std::isfinite(argument)) {
    throw DomainError("kernel argument must be finite and non-negative");
  }
  if (argument == 0.0 && model.kernel != Kernel::Waveguide1D) {
    throw DomainError("kernel diverges at zero separation");
  }
  const double u = argument;
  switch (model.kernel) {
    case Kernel::Waveguide1D:
      return cplx(0.0, -0.5 * g) * std::exp(cplx(0.0, u));
    case Kernel::Waveguide2D:
      return 0.5 * g * cplx(special::bessel_y0(u), -special::bessel_j0(u));
    case Kernel::FreeSpace2D: {
      const cplx poly(1.0 - u * u, -u);
      return 3.0 * g / (4.0 * u * u * u) * std::exp(cplx(0.0, u)) * poly;
    }
    case Kernel::BandGap2D:
      return {model.coupling * special::bessel_k0(u), 0.0};
  }
  throw UnsupportedError("unknown kernel");
}

double kernel_argument(const GreensModel& model, const Lattice& lattice, int i, int j) {
  const double r = lattice.distance(i, j);
  if (model.kernel == Kernel::BandGap2D) return model.localization * r;
  return lattice.spacing() * r;
}

Eigen::MatrixXcd coupling_matrix(const Lattice& lattice, const GreensModel& model) {
  model.validate();
  const int n = lattice.size();
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i) {
    g(i, i) = greens_kernel(model, 0.0, true);
    for (int j = i + 1; j < n; ++j) {
      g(i, j) = greens_kernel(model, kernel_argument(model, lattice, i, j), false);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

}  // namespace dimerlab
