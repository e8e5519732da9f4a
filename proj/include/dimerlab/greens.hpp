#pragma once

#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "dimerlab/lattice.hpp"

namespace dimerlab {

using cplx = std::complex<double>;

enum class Kernel { Waveguide1D, Waveguide2D, FreeSpace2D, BandGap2D };

std::string_view to_string(Kernel kernel);
Kernel kernel_from_string(std::string_view name);

/// Photon-mediated interaction model. Energies and rates are in units of the
/// single-atom decay rate, so `gamma` is 1 unless deliberately rescaled.
struct GreensModel {
  Kernel kernel = Kernel::Waveguide2D;
  double gamma = 1.0;
  double coupling = 1.0;      // J, band gap only
  double localization = 1.0;  // xi in units of 1/d, band gap only

  static GreensModel waveguide_1d() { return {Kernel::Waveguide1D}; }
  static GreensModel waveguide_2d() { return {Kernel::Waveguide2D}; }
  static GreensModel free_space() { return {Kernel::FreeSpace2D}; }
  static GreensModel band_gap(double coupling, double localization) {
    return {Kernel::BandGap2D, 1.0, coupling, localization};
  }

  bool dissipative() const noexcept { return kernel != Kernel::BandGap2D; }
  void validate() const;
};

namespace special {
double bessel_j0(double x);
double bessel_y0(double x);
double bessel_k0(double x);
}  // namespace special

/// Kernel G evaluated at a dimensionless argument: k0*x for the radiative
/// kernels, xi*x (x in units of d) for the band-gap kernel.
///
/// The diagonal value is -i*gamma/2 for radiative kernels and 0 for the
/// band-gap kernel. Off-diagonal evaluation at argument 0 throws DomainError.
cplx greens_kernel(const GreensModel& model, double argument, bool diagonal);

/// Kernel argument for the pair (i, j) of `lattice`.
double kernel_argument(const GreensModel& model, const Lattice& lattice, int i, int j);

/// Full N x N coupling matrix G_ij (complex symmetric).
Eigen::MatrixXcd coupling_matrix(const Lattice& lattice, const GreensModel& model);

}  // namespace dimerlab
