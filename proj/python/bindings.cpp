// Python bindings: thin wrappers, numpy in and out via pybind11/eigen.
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dimerlab/dimer_covering.hpp"
#include "dimerlab/dynamics.hpp"
#include "dimerlab/errors.hpp"
#include "dimerlab/experiment.hpp"
#include "dimerlab/io.hpp"
#include "dimerlab/observables.hpp"
#include "dimerlab/spectral.hpp"

namespace py = pybind11;
using namespace dimerlab;

namespace {

StateVector rvb_for(const Lattice& lattice) {
  return rvb_state(enumerate_coverings(lattice), SectorBasis(lattice.size(), lattice.size() / 2));
}

std::vector<std::vector<Bond>> covering_pairs(const Lattice& lattice) {
  std::vector<std::vector<Bond>> out;
  for (const auto& c : enumerate_coverings(lattice).coverings) out.push_back(c.pairs);
  return out;
}

py::dict comparison(const RvbComparison& c) {
  py::dict d;
  d["fidelity"] = c.fidelity;
  d["eigenvalue"] = c.least_radiant.eigenvalue;
  d["decay"] = c.least_radiant.decay;
  d["state"] = c.least_radiant.state;
  d["rvb"] = c.rvb;
  d["relative_residual"] = c.least_radiant.relative_residual;
  d["degenerate_count"] = c.least_radiant.degenerate_count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_dimerlab, m) {
  m.doc() = "Dimerization in atomic arrays: spectra, RVB overlaps and driven steady states.";
  m.def("version", [] { return std::string(version()); });

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", error);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", error);
  py::register_exception<ValidationError>(m, "ValidationError", error);
  py::register_exception<CapacityError>(m, "CapacityError", error);
  auto solver = py::register_exception<SolverError>(m, "SolverError", error);
  py::register_exception<MultiplicityError>(m, "MultiplicityError", solver);

  py::enum_<Kernel>(m, "Kernel")
      .value("Waveguide1D", Kernel::Waveguide1D)
      .value("Waveguide2D", Kernel::Waveguide2D)
      .value("FreeSpace2D", Kernel::FreeSpace2D)
      .value("BandGap2D", Kernel::BandGap2D);

  py::class_<GreensModel>(m, "GreensModel")
      .def(py::init([](const std::string& kernel, double coupling, double localization) {
             GreensModel g{kernel_from_string(kernel)};
             g.coupling = coupling;
             g.localization = localization;
             g.validate();
             return g;
           }),
           py::arg("kernel"), py::arg("coupling") = 1.0, py::arg("localization") = 1.0)
      .def_readonly("kernel", &GreensModel::kernel)
      .def_readonly("coupling", &GreensModel::coupling)
      .def_readonly("localization", &GreensModel::localization)
      .def("__call__", [](const GreensModel& g, double u) { return greens_kernel(g, u, false); });

  py::class_<Lattice>(m, "Lattice")
      .def_static("chain", &Lattice::chain, py::arg("n"), py::arg("spacing"))
      .def_static("square", &Lattice::square, py::arg("nx"), py::arg("ny"), py::arg("spacing"))
      .def_property_readonly("nx", &Lattice::nx)
      .def_property_readonly("ny", &Lattice::ny)
      .def_property_readonly("size", &Lattice::size)
      .def_property_readonly("spacing", &Lattice::spacing)
      .def_property_readonly("bonds", &Lattice::bonds)
      .def("index", &Lattice::index)
      .def("__repr__", [](const Lattice& l) { return "<Lattice " + l.label() + ">"; });

  py::class_<SectorBasis>(m, "SectorBasis")
      .def(py::init<int, int>(), py::arg("sites"), py::arg("excitations"))
      .def_property_readonly("dimension", &SectorBasis::dimension)
      .def_property_readonly("configs", [](const SectorBasis& b) {
        return std::vector<std::uint64_t>(b.configs().begin(), b.configs().end());
      });

  py::class_<StateVector>(m, "StateVector")
      .def_readonly("basis", &StateVector::basis)
      .def_property_readonly("amplitudes", [](const StateVector& s) { return s.amplitudes; })
      .def("embed", &StateVector::embed);

  m.def("coupling_matrix", &coupling_matrix);
  m.def("coverings", &covering_pairs, "Dimer coverings as lists of (A site, B site) pairs.");
  m.def("count_matchings", &count_matchings_oracle);
  m.def("rvb_state", &rvb_for);
  m.def("fidelity", &fidelity);
  m.def("pair_rates", [](const GreensModel& g, double argument) {
    const auto r = pair_rates(g, argument);
    return py::make_tuple(r.dimer, r.triplet);
  });
  m.def("dimerization_condition", &dimerization_condition);

  m.def("least_radiant", [](const Lattice& l, const GreensModel& g) { return comparison(compare_least_radiant(l, g)); },
        "Least radiant half-filling state and its RVB overlap.");
  m.def("ground_state", [](const Lattice& l, const GreensModel& g) {
    const auto c = compare_ground_state(l, g);
    py::dict d;
    d["fidelity"] = c.fidelity;
    d["energy"] = c.ground.energy;
    d["state"] = c.ground.state;
    return d;
  });

  m.def("entanglement_entropy", [](const StateVector& s, const std::vector<int>& part) {
    return entanglement_entropy(s, part);
  });
  m.def("reduced_density", [](const StateVector& s, const std::vector<int>& part) {
    return reduced_density(s, part).matrix;
  });
  m.def("concurrence", [](const Eigen::MatrixXcd& rho) { return concurrence(ReducedDensity{{0, 1}, rho}); });
  m.def("spin_correlation", &spin_correlation);
  m.def("avg_nn_concurrence", py::overload_cast<const StateVector&, const Lattice&>(&avg_nn_concurrence));

  py::class_<Liouvillian>(m, "Liouvillian")
      .def(py::init([](const Lattice& l, const GreensModel& g, double rabi, double detuning, const std::string& pattern) {
             return Liouvillian(l, g, DriveSpec::make(l, rabi, detuning, drive_pattern_from_string(pattern)));
           }),
           py::arg("lattice"), py::arg("model"), py::arg("rabi"), py::arg("detuning"),
           py::arg("pattern") = "checkerboard")
      .def("apply", &Liouvillian::apply)
      .def("hamiltonian", &Liouvillian::hamiltonian)
      .def_property_readonly("sites", &Liouvillian::sites);

  m.def(
      "steady_state",
      [](const Liouvillian& l, const std::string& method, double tolerance) {
        SteadyStateOptions o;
        o.method = steady_state_method_from_string(method);
        o.tolerance = tolerance;
        SteadyStateResult r;
        {
          py::gil_scoped_release release;
          r = steady_state(l, o);
        }
        py::dict d;
        d["rho"] = r.rho;
        d["relative_residual"] = r.relative_residual;
        d["method"] = std::string(to_string(r.method));
        d["iterations"] = r.iterations;
        return d;
      },
      py::arg("liouvillian"), py::arg("method") = "auto", py::arg("tolerance") = 1e-10);

  m.def("preset_names", [] {
    std::vector<std::string> names;
    for (const auto& p : presets()) names.push_back(p.name);
    return names;
  });
  m.def("_resolve_config", [](const std::string& text) {
    return to_json(parse_config(nlohmann::json::parse(text))).dump();
  });
  m.def("_run_experiment", [](const std::string& text) {
    const ExperimentConfig c = parse_config(nlohmann::json::parse(text));
    RunSummary s;
    {
      py::gil_scoped_release release;
      s = run_experiment(c);
    }
    return py::make_tuple(s.files, s.max_eigen_residual, s.max_steady_residual);
  });
}
