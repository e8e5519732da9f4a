#include "dimerlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "dimerlab/errors.hpp"
#include "dimerlab/io.hpp"
#include "dimerlab/observables.hpp"
#include "dimerlab/parallel.hpp"

namespace dimerlab {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------- presets

json step_grid(double start, double stop, double step) {
  return {{"start", start}, {"stop", stop}, {"step", step}};
}

json shapes(std::initializer_list<Shape> list) {
  json out = json::array();
  for (auto [nx, ny] : list) out.push_back({nx, ny});
  return out;
}

json shape_range(int nx, int ny_from, int ny_to) {
  json out = json::array();
  for (int ny = ny_from; ny <= ny_to; ++ny) out.push_back({nx, ny});
  return out;
}

json chain_range(int from, int to, int step) {
  json out = json::array();
  for (int n = from; n <= to; n += step) out.push_back({n, 1});
  return out;
}

json series(const std::string& label, const std::string& model, json spacings, json lattices) {
  return {{"label", label}, {"model", model}, {"spacings", std::move(spacings)}, {"lattices", std::move(lattices)}};
}

std::vector<PresetInfo> build_presets() {
  std::vector<PresetInfo> p;
  const json wide = step_grid(0.05, 0.95, 0.05);
  p.push_back({"fig2", "least radiant state vs RVB fidelity over k0d for three kernels",
               {{"experiment", "fig2"},
                {"series", {series("waveguide1d", "waveguide1d", wide, shapes({{4, 1}, {8, 1}, {12, 1}})),
                            series("waveguide2d", "waveguide2d", wide, shapes({{2, 2}, {4, 2}, {4, 4}})),
                            series("freespace2d", "freespace2d", wide, shapes({{2, 2}, {4, 2}, {4, 4}}))}}}});
  json ladders = shape_range(2, 2, 8);
  p.push_back({"fig3", "infidelity density scaling with system size (k0d = 0.1 pi, 0.42 pi)",
               {{"experiment", "fig3"},
                {"series", {series("chains", "waveguide1d", {0.1}, chain_range(4, 16, 2)),
                            series("ladders", "waveguide2d", {0.1}, ladders),
                            series("ladders_freespace", "freespace2d", {0.42}, ladders)}}}});
  json correlations = json::array();
  correlations.push_back({{"lattice", {2, 10}}, {"anchor", {0, 0}}, {"direction", {0, 1}}, {"state", "rvb"},
                          {"model", "waveguide2d"}, {"spacing", 0.1}});
  correlations.push_back({{"lattice", {5, 4}}, {"anchor", {0, 1}}, {"direction", {1, 0}}, {"state", "rvb"},
                          {"model", "waveguide2d"}, {"spacing", 0.1}});
  correlations.push_back({{"lattice", {2, 8}}, {"anchor", {0, 0}}, {"direction", {0, 1}},
                          {"state", "least_radiant"}, {"model", "waveguide2d"}, {"spacing", 0.1}});
  correlations.push_back({{"lattice", {4, 4}}, {"anchor", {0, 1}}, {"direction", {1, 0}},
                          {"state", "least_radiant"}, {"model", "waveguide2d"}, {"spacing", 0.1}});
  p.push_back({"fig4", "spin correlations, entanglement entropy and nearest-neighbour concurrence",
               {{"experiment", "fig4"},
                {"correlations", correlations},
                {"series", {series("entropy", "waveguide2d", {0.1}, ladders),
                            series("concurrence", "waveguide2d", step_grid(0.05, 0.5, 0.05), shapes({{4, 4}}))}}}});
  p.push_back({"fig5", "driven steady state: RVB fidelity and concurrence vs detuning (Omega = 0.05)",
               {{"experiment", "fig5"},
                {"series", {series("waveguide2d", "waveguide2d", {0.1}, shapes({{2, 2}, {2, 4}}))}},
                {"detunings", step_grid(-0.2, 1.2, 0.05)},
                {"drive", {{"rabi", 0.05}, {"pattern", "checkerboard"}}}}});
  const json decay_shapes = shapes({{2, 2}, {2, 3}, {2, 4}, {2, 5}, {2, 6}, {4, 3}, {4, 4}});
  p.push_back({"fig6", "least radiant decay rate vs the (N/2) gamma_D dimer bound",
               {{"experiment", "fig6"},
                {"series", {series("freespace2d", "freespace2d", {0.42}, decay_shapes),
                            series("waveguide2d", "waveguide2d", {0.1}, decay_shapes)}}}});
  p.push_back({"fig7", "band-gap ground state vs RVB over the localization parameter xi",
               {{"experiment", "fig7"},
                {"series", {series("ladders2", "bandgap2d", {1.0}, shapes({{2, 4}, {2, 6}, {2, 8}})),
                            series("ladders4", "bandgap2d", {1.0}, shapes({{4, 3}, {4, 4}}))}},
                {"xi", {0.1, 0.2, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0}},
                {"coupling", 1.0}}});
  json covering_shapes = shape_range(2, 1, 12);
  for (int ny = 2; ny <= 9; ++ny) covering_shapes.push_back({4, ny});
  p.push_back({"fig8", "dimerization-condition map for chains and dimer-covering counts",
               {{"experiment", "fig8"},
                {"series", {series("condition", "waveguide1d", step_grid(0.02, 0.98, 0.02), chain_range(2, 40, 1)),
                            series("coverings", "waveguide2d", {0.1}, covering_shapes)}}}});
  for (auto& preset : p) {
    preset.defaults["output"] = "results/" + preset.name;
    preset.defaults["solver"] = json::object();
  }
  return p;
}

// ---------------------------------------------------------------- parsing

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw ValidationError("field '" + field + "': " + message);
}

void check_keys(const json& j, const std::string& field, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(field, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
      fail(field.empty() ? key : field + "." + key, "unknown field");
    }
  }
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(field, "must be finite");
  return v;
}

double get_positive(const json& j, const std::string& field) {
  const double v = get_number(j, field);
  if (!(v > 0.0)) fail(field, "must be > 0");
  return v;
}

int get_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& field) {
  if (!j.is_string()) fail(field, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_grid(const json& j, const std::string& field) {
  std::vector<double> out;
  if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(get_number(j[k], field + "[" + std::to_string(k) + "]"));
  } else if (j.is_object()) {
    check_keys(j, field, {"start", "stop", "step", "count"});
    if (!j.contains("start") || !j.contains("stop")) fail(field, "grid needs 'start' and 'stop'");
    const double start = get_number(j["start"], field + ".start");
    const double stop = get_number(j["stop"], field + ".stop");
    if (j.contains("step") == j.contains("count")) fail(field, "grid needs exactly one of 'step' or 'count'");
    std::size_t count = 0;
    if (j.contains("count")) {
      const int c = get_int(j["count"], field + ".count");
      if (c < 1) fail(field + ".count", "must be >= 1");
      count = static_cast<std::size_t>(c);
    } else {
      const double step = get_positive(j["step"], field + ".step");
      if (stop < start) fail(field, "'stop' is below 'start'");
      count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
      if (count > 1000000) fail(field, "grid too large");
    }
    for (std::size_t k = 0; k < count; ++k) {
      const double t = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
      double v = j.contains("count") ? start + t * (stop - start) : start + static_cast<double>(k) * j["step"].get<double>();
      v = std::round(v * 1e12) / 1e12;  // keep 0.15 from printing as 0.15000000000000002
      out.push_back(v);
    }
  } else {
    fail(field, "expected an array of numbers or a {start, stop, step|count} object");
  }
  if (out.empty()) fail(field, "must not be empty");
  return out;
}

Shape get_shape(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) fail(field, "expected [nx, ny]");
  return {get_int(j[0], field + "[0]"), get_int(j[1], field + "[1]")};
}

Kernel get_model(const json& j, const std::string& field) {
  try {
    return kernel_from_string(get_string(j, field));
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    fail(field, e.what());
  }
}

bool needs_half_filling(const std::string& experiment, const std::string& label) {
  return !(experiment == "fig8" && label == "condition");
}

SeriesSpec parse_series(const json& j, const std::string& field, const std::string& experiment) {
  check_keys(j, field, {"label", "model", "spacings", "lattices"});
  SeriesSpec s;
  for (const char* key : {"label", "model", "spacings", "lattices"}) {
    if (!j.contains(key)) fail(field + "." + key, "missing");
  }
  s.label = get_string(j["label"], field + ".label");
  if (s.label.empty()) fail(field + ".label", "must not be empty");
  s.model = get_model(j["model"], field + ".model");
  s.spacings = get_grid(j["spacings"], field + ".spacings");
  for (std::size_t k = 0; k < s.spacings.size(); ++k) {
    if (!(s.spacings[k] > 0.0)) fail(field + ".spacings[" + std::to_string(k) + "]", "spacing must be > 0");
  }
  const json& lat = j["lattices"];
  if (!lat.is_array() || lat.empty()) fail(field + ".lattices", "expected a nonempty array of [nx, ny]");
  for (std::size_t k = 0; k < lat.size(); ++k) {
    const std::string f = field + ".lattices[" + std::to_string(k) + "]";
    const Shape shape = get_shape(lat[k], f);
    if (shape.first < 1 || shape.second < 1 || shape.first * shape.second < 2) fail(f, "need nx, ny >= 1 and N >= 2");
    if (shape.first * shape.second > 63) fail(f, "more than 63 sites");
    if (needs_half_filling(experiment, s.label) && (shape.first * shape.second) % 2 != 0) {
      fail(f, "half filling needs an even number of sites");
    }
    s.lattices.push_back(shape);
  }
  const bool band_gap = s.model == Kernel::BandGap2D;
  if (experiment == "fig7" && !band_gap) fail(field + ".model", "fig7 needs the bandgap2d model");
  if (experiment != "fig7" && band_gap && !(experiment == "fig8" && s.label == "coverings")) {
    fail(field + ".model", "the bandgap2d model is only valid for fig7");
  }
  if (experiment == "fig4" && s.label != "entropy" && s.label != "concurrence") {
    fail(field + ".label", "fig4 series must be labelled 'entropy' or 'concurrence'");
  }
  if (experiment == "fig8" && s.label != "condition" && s.label != "coverings") {
    fail(field + ".label", "fig8 series must be labelled 'condition' or 'coverings'");
  }
  return s;
}

CorrelationSpec parse_correlation(const json& j, const std::string& field) {
  check_keys(j, field, {"lattice", "anchor", "direction", "state", "model", "spacing"});
  for (const char* key : {"lattice", "anchor", "direction", "state", "model", "spacing"}) {
    if (!j.contains(key)) fail(field + "." + key, "missing");
  }
  CorrelationSpec c;
  c.lattice = get_shape(j["lattice"], field + ".lattice");
  c.anchor = get_shape(j["anchor"], field + ".anchor");
  c.direction = get_shape(j["direction"], field + ".direction");
  c.state = get_string(j["state"], field + ".state");
  c.model = get_model(j["model"], field + ".model");
  c.spacing = get_positive(j["spacing"], field + ".spacing");
  const auto [nx, ny] = c.lattice;
  if (nx < 1 || ny < 1 || nx * ny < 2 || (nx * ny) % 2) fail(field + ".lattice", "need an even number of sites >= 2");
  if (c.anchor.first < 0 || c.anchor.first >= nx || c.anchor.second < 0 || c.anchor.second >= ny) {
    fail(field + ".anchor", "outside the lattice");
  }
  if (c.direction == Shape{0, 0}) fail(field + ".direction", "must be nonzero");
  if (c.state != "rvb" && c.state != "least_radiant") fail(field + ".state", "expected 'rvb' or 'least_radiant'");
  if (c.model == Kernel::BandGap2D) fail(field + ".model", "correlation profiles use a radiative kernel");
  return c;
}

SolverSettings parse_solver(const json& j) {
  check_keys(j, "solver", {"dense_cap", "tie_tolerance", "residual_tolerance", "steady_state", "steady_tolerance",
                           "krylov_restart"});
  SolverSettings s;
  if (j.contains("dense_cap")) {
    const int cap = get_int(j["dense_cap"], "solver.dense_cap");
    if (cap < 1) fail("solver.dense_cap", "must be >= 1");
    s.dense_cap = static_cast<std::size_t>(cap);
  }
  if (j.contains("tie_tolerance")) s.tie_tolerance = get_positive(j["tie_tolerance"], "solver.tie_tolerance");
  if (j.contains("residual_tolerance")) {
    s.residual_tolerance = get_positive(j["residual_tolerance"], "solver.residual_tolerance");
  }
  if (j.contains("steady_state")) {
    try {
      s.steady_state = steady_state_method_from_string(get_string(j["steady_state"], "solver.steady_state"));
    } catch (const ValidationError& e) {
      fail("solver.steady_state", e.what());
    }
  }
  if (j.contains("steady_tolerance")) s.steady_tolerance = get_positive(j["steady_tolerance"], "solver.steady_tolerance");
  if (j.contains("krylov_restart")) {
    s.krylov_restart = get_int(j["krylov_restart"], "solver.krylov_restart");
    if (s.krylov_restart < 2) fail("solver.krylov_restart", "must be >= 2");
  }
  return s;
}

json grid_json(const std::vector<double>& v) { return json(v); }

json shape_json(Shape s) { return json::array({s.first, s.second}); }

std::string sanitize(const std::string& label) {
  std::string out;
  for (char c : label) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_';
  return out;
}

std::string shape_label(Shape s) { return std::to_string(s.first) + "x" + std::to_string(s.second); }

// ---------------------------------------------------------------- running

struct Writer {
  const ExperimentConfig& config;
  RunSummary& summary;

  void operator()(const std::string& stem, const CsvTable& table, json metadata) const {
    namespace fs = std::filesystem;
    const fs::path dir(config.output);
    const fs::path csv = dir / (stem + ".csv");
    json sidecar;
    sidecar["version"] = std::string(version());
    sidecar["experiment"] = config.experiment;
    sidecar["file"] = csv.filename().string();
    sidecar["columns"] = table.header;
    sidecar["config"] = to_json(config);
    sidecar["metadata"] = std::move(metadata);
    sidecar["residuals"] = {{"max_relative_eigen_residual", summary.max_eigen_residual},
                            {"max_relative_steady_residual", summary.max_steady_residual}};
    sidecar["conventions"] = {{"spacing_unit", "k0 d in multiples of pi"},
                              {"rate_unit", "single-atom decay rate gamma"},
                              {"state_order", "s = 1 is the smallest decay rate"},
                              {"entropy_log", "natural"},
                              {"vectorization", "column-stacking"},
                              {"basis", "ascending occupation words, bit i = site i, row-major sites"}};
    write_csv(csv, table);
    fs::path meta = csv;
    meta.replace_extension(".json");
    write_json(meta, sidecar);
    summary.files.push_back(csv);
  }
};

GreensModel radiative(Kernel k) { return GreensModel{k}; }

void note_residual(double& slot, double value) { slot = std::max(slot, value); }

void run_fidelity_series(const ExperimentConfig& c, RunSummary& summary, const Writer& write, bool scaling) {
  const SpectralOptions opts = c.solver.spectral();
  for (const auto& s : c.series) {
    struct Point {
      Shape shape;
      double spacing;
      std::optional<RvbComparison> result;
    };
    std::vector<Point> points;
    for (auto shape : s.lattices) {
      for (double sp : s.spacings) points.push_back({shape, sp, std::nullopt});
    }
    // Coverings and RVB states depend only on the geometry.
    std::map<Shape, StateVector> rvb;
    for (auto shape : s.lattices) {
      const Lattice lat = make_lattice(shape, 1.0);
      rvb.emplace(shape, rvb_state(enumerate_coverings(lat), SectorBasis(lat.size(), lat.size() / 2)));
    }
    parallel_for(points.size(), [&](std::size_t k) {
      Point& p = points[k];
      const Lattice lat = make_lattice(p.shape, p.spacing * kPi);
      p.result = compare_least_radiant(lat, radiative(s.model), opts, &rvb.at(p.shape));
    });
    CsvTable t;
    t.header = scaling ? std::vector<std::string>{"N", "nx", "ny", "k0d_over_pi", "fidelity", "infidelity_density", "gamma_s1"}
                       : std::vector<std::string>{"k0d_over_pi", "N", "fidelity", "gamma_s1", "infidelity_density",
                                                  "re_energy", "nx", "ny", "degenerate_count"};
    std::size_t ties = 0;
    for (const auto& p : points) {
      const int n = p.shape.first * p.shape.second;
      const auto& lr = p.result->least_radiant;
      note_residual(summary.max_eigen_residual, lr.relative_residual);
      ties += lr.tie_broken_by_reference ? 1 : 0;
      const double fid = p.result->fidelity;
      const double idens = infidelity_density(fid, n);
      if (scaling) {
        t.add_row({(long long)n, (long long)p.shape.first, (long long)p.shape.second, p.spacing, fid, idens, lr.decay});
      } else {
        t.add_row({p.spacing, (long long)n, fid, lr.decay, idens, lr.eigenvalue.real(),
                   (long long)p.shape.first, (long long)p.shape.second, (long long)lr.degenerate_count});
      }
    }
    write(c.experiment + "_" + sanitize(s.label), t,
          {{"series", s.label}, {"model", std::string(to_string(s.model))}, {"ties_broken_by_reference", ties}});
  }
}

void run_fig2(const ExperimentConfig& c, RunSummary& summary, const Writer& write) {
  run_fidelity_series(c, summary, write, false);
  CsvTable rates;
  rates.header = {"model", "k0x_over_pi", "gamma_D", "gamma_T"};
  for (const auto& s : c.series) {
    for (double sp : s.spacings) {
      const auto r = pair_rates(radiative(s.model), sp * kPi);
      rates.add_row({std::string(to_string(s.model)), sp, r.dimer, r.triplet});
    }
  }
  write("fig2_pair_rates", rates, json::object());
}

void run_fig4(const ExperimentConfig& c, RunSummary& summary, const Writer& write) {
  const SpectralOptions opts = c.solver.spectral();
  if (!c.correlations.empty()) {
    CsvTable t;
    t.header = {"lattice", "state", "anchor_ix", "anchor_iy", "l", "C", "abs_C"};
    for (const auto& spec : c.correlations) {
      const Lattice lat = make_lattice(spec.lattice, spec.spacing * kPi);
      const SectorBasis basis(lat.size(), lat.size() / 2);
      StateVector rvb = rvb_state(enumerate_coverings(lat), basis);
      StateVector state = rvb;
      if (spec.state == "least_radiant") {
        auto cmp = compare_least_radiant(lat, radiative(spec.model), opts, &rvb);
        note_residual(summary.max_eigen_residual, cmp.least_radiant.relative_residual);
        state = std::move(cmp.least_radiant.state);
      }
      const int anchor = lat.index(spec.anchor.first, spec.anchor.second);
      const auto profile = correlation_profile(state, lat, anchor, spec.direction.first, spec.direction.second);
      for (std::size_t k = 0; k < profile.values.size(); ++k) {
        t.add_row({shape_label(spec.lattice), spec.state, (long long)spec.anchor.first, (long long)spec.anchor.second,
                   (long long)profile.displacements[k], profile.values[k], std::abs(profile.values[k])});
      }
    }
    write("fig4_correlations", t, {{"anchor_convention", "0-indexed (ix, iy); l steps along direction"}});
  }
  for (const auto& s : c.series) {
    if (s.label == "entropy") {
      CsvTable t;
      t.header = {"nx", "ny", "N", "k0d_over_pi", "S_long", "S_short", "S_long_rvb", "S_short_rvb", "fidelity"};
      for (auto shape : s.lattices) {
        for (double sp : s.spacings) {
          const Lattice lat = make_lattice(shape, sp * kPi);
          const auto cmp = compare_least_radiant(lat, radiative(s.model), opts);
          note_residual(summary.max_eigen_residual, cmp.least_radiant.relative_residual);
          const auto cut_long = long_edge_partition(lat);
          const auto cut_short = short_edge_partition(lat);
          const auto& psi = cmp.least_radiant.state;
          t.add_row({(long long)shape.first, (long long)shape.second, (long long)lat.size(), sp,
                     entanglement_entropy(psi, cut_long), entanglement_entropy(psi, cut_short),
                     entanglement_entropy(cmp.rvb, cut_long), entanglement_entropy(cmp.rvb, cut_short), cmp.fidelity});
        }
      }
      write("fig4_entropy", t, {{"long_cut", "sites with x = 0"}, {"short_cut", "sites with y < ny / 2"}});
    } else if (s.label == "concurrence") {
      CsvTable t;
      t.header = {"k0d_over_pi", "N", "nx", "ny", "concurrence", "concurrence_rvb", "fidelity"};
      for (auto shape : s.lattices) {
        const Lattice geometry = make_lattice(shape, 1.0);
        const StateVector rvb = rvb_state(enumerate_coverings(geometry), SectorBasis(geometry.size(), geometry.size() / 2));
        const double c_rvb = avg_nn_concurrence(rvb, geometry);
        std::vector<std::optional<RvbComparison>> results(s.spacings.size());
        parallel_for(s.spacings.size(), [&](std::size_t k) {
          results[k] = compare_least_radiant(make_lattice(shape, s.spacings[k] * kPi), radiative(s.model), opts, &rvb);
        });
        for (std::size_t k = 0; k < results.size(); ++k) {
          const RvbComparison& r = *results[k];
          note_residual(summary.max_eigen_residual, r.least_radiant.relative_residual);
          t.add_row({s.spacings[k], (long long)geometry.size(), (long long)shape.first, (long long)shape.second,
                     avg_nn_concurrence(r.least_radiant.state, geometry), c_rvb, r.fidelity});
        }
      }
      write("fig4_concurrence", t, json::object());
    }
  }
}

void run_fig5(const ExperimentConfig& c, RunSummary& summary, const Writer& write) {
  const SpectralOptions opts = c.solver.spectral();
  const SteadyStateOptions steady = c.solver.steady();
  for (const auto& s : c.series) {
    for (auto shape : s.lattices) {
      for (double sp : s.spacings) {
        const Lattice lat = make_lattice(shape, sp * kPi);
        const GreensModel model = radiative(s.model);
        const auto cmp = compare_least_radiant(lat, model, opts);
        note_residual(summary.max_eigen_residual, cmp.least_radiant.relative_residual);
        const auto sweep = detuning_sweep(lat, model, c.rabi, drive_signs(lat, c.pattern), c.detunings, cmp.rvb,
                                          cmp.least_radiant.eigenvalue, steady);
        CsvTable t;
        t.header = {"detuning", "fidelity", "concurrence", "residual"};
        std::set<std::string> methods;
        int iterations = 0;
        std::size_t peak = 0;
        for (std::size_t k = 0; k < sweep.points.size(); ++k) {
          const auto& p = sweep.points[k];
          note_residual(summary.max_steady_residual, p.relative_residual);
          methods.insert(std::string(to_string(p.method)));
          iterations = std::max(iterations, p.iterations);
          if (p.fidelity > sweep.points[peak].fidelity) peak = k;
          t.add_row({p.detuning, p.fidelity, p.concurrence, p.relative_residual});
        }
        const double at = sweep.points[peak].detuning;
        const bool per_excitation =
            std::abs(at - sweep.marker_per_excitation) <= std::abs(at - sweep.marker_energy);
        json meta = {{"lattice", shape_label(shape)},
                     {"k0d_over_pi", sp},
                     {"rabi", c.rabi},
                     {"pattern", std::string(to_string(c.pattern))},
                     {"pattern_signs", drive_signs(lat, c.pattern)},
                     {"target", "rvb"},
                     {"target_energy", {sweep.target_energy.real(), sweep.target_energy.imag()}},
                     {"markers", {{"re_energy", sweep.marker_energy}, {"per_excitation", sweep.marker_per_excitation}}},
                     {"selected_marker", per_excitation ? "per_excitation" : "re_energy"},
                     {"peak_detuning", at},
                     {"solver_path", methods},
                     {"max_iterations", iterations},
                     {"liouvillian_norm", sweep.liouvillian_norm},
                     {"target_fidelity_with_least_radiant", cmp.fidelity}};
        write("fig5_" + sanitize(s.label) + "_" + shape_label(shape), t, std::move(meta));
      }
    }
  }
}

void run_fig6(const ExperimentConfig& c, RunSummary& summary, const Writer& write) {
  const SpectralOptions opts = c.solver.spectral();
  for (const auto& s : c.series) {
    CsvTable t;
    t.header = {"N", "nx", "ny", "k0d_over_pi", "gamma_s1", "dimer_bound", "bound_holds"};
    for (double sp : s.spacings) {
      std::vector<std::vector<DecayPoint>> rows(s.lattices.size());
      parallel_for(s.lattices.size(), [&](std::size_t k) {
        rows[k] = decay_scaling(radiative(s.model), {s.lattices[k]}, sp * kPi, opts);
      });
      for (const auto& r : rows) {
        const DecayPoint& p = r.front();
        t.add_row({(long long)p.sites, (long long)p.nx, (long long)p.ny, sp, p.least_radiant_decay, p.dimer_bound,
                   (long long)(p.least_radiant_decay <= p.dimer_bound + 1e-10)});
      }
    }
    write("fig6_" + sanitize(s.label), t, {{"model", std::string(to_string(s.model))}});
  }
}

void run_fig7(const ExperimentConfig& c, RunSummary& summary, const Writer& write) {
  const SpectralOptions opts = c.solver.spectral();
  for (const auto& s : c.series) {
    CsvTable t;
    t.header = {"xi", "N", "nx", "ny", "fidelity", "infidelity_density", "energy", "degenerate_count"};
    for (auto shape : s.lattices) {
      std::vector<std::optional<GroundComparison>> results(c.xi.size());
      parallel_for(c.xi.size(), [&](std::size_t k) {
        results[k] = compare_ground_state(make_lattice(shape, 1.0), GreensModel::band_gap(c.coupling, c.xi[k]), opts);
      });
      for (std::size_t k = 0; k < results.size(); ++k) {
        const GroundComparison& g = *results[k];
        const int n = shape.first * shape.second;
        note_residual(summary.max_eigen_residual, g.ground.relative_residual);
        t.add_row({c.xi[k], (long long)n, (long long)shape.first, (long long)shape.second, g.fidelity,
                   infidelity_density(g.fidelity, n), g.ground.energy, (long long)g.ground.degenerate_count});
      }
    }
    write("fig7_" + sanitize(s.label), t, {{"coupling", c.coupling}, {"xi_argument", "xi times distance in units of d"}});
  }
}

void run_fig8(const ExperimentConfig& c, RunSummary&, const Writer& write) {
  for (const auto& s : c.series) {
    if (s.label == "condition") {
      std::vector<double> radians;
      for (double sp : s.spacings) radians.push_back(sp * kPi);
      const auto map = condition_map(radiative(s.model), s.lattices, radians);
      CsvTable t;
      t.header = {"N", "nx", "ny", "k0d_over_pi", "holds"};
      for (std::size_t r = 0; r < map.shapes.size(); ++r) {
        const auto [nx, ny] = map.shapes[r];
        for (std::size_t k = 0; k < s.spacings.size(); ++k) {
          t.add_row({(long long)(nx * ny), (long long)nx, (long long)ny, s.spacings[k], (long long)map.holds[r][k]});
        }
      }
      write("fig8_condition", t, {{"model", std::string(to_string(s.model))}});
    } else {
      CsvTable t;
      t.header = {"nx", "ny", "N", "count", "oracle_count"};
      for (auto shape : s.lattices) {
        const Lattice lat = make_lattice(shape, 1.0);
        const auto set = enumerate_coverings(lat);
        const long long oracle =
            lat.size() <= static_cast<int>(kMatchingOracleCap) ? static_cast<long long>(count_matchings_oracle(lat)) : -1;
        t.add_row({(long long)shape.first, (long long)shape.second, (long long)lat.size(),
                   (long long)set.coverings.size(), oracle});
      }
      write("fig8_coverings", t, {{"oracle_cap", kMatchingOracleCap}});
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- public

Lattice make_lattice(Shape shape, double spacing) {
  return shape.second == 1 ? Lattice::chain(shape.first, spacing) : Lattice::square(shape.first, shape.second, spacing);
}

SpectralOptions SolverSettings::spectral() const {
  SpectralOptions o;
  o.dense_cap = dense_cap;
  o.tie_tolerance = tie_tolerance;
  o.residual_tolerance = residual_tolerance;
  return o;
}

SteadyStateOptions SolverSettings::steady() const {
  SteadyStateOptions o;
  o.method = steady_state;
  o.tolerance = steady_tolerance;
  o.krylov_restart = krylov_restart;
  return o;
}

const std::vector<PresetInfo>& presets() {
  static const std::vector<PresetInfo> p = build_presets();
  return p;
}

ExperimentConfig parse_config(const json& user) {
  if (!user.is_object()) throw ValidationError("config must be a JSON object");
  if (!user.contains("experiment")) fail("experiment", "missing");
  const std::string name = get_string(user["experiment"], "experiment");
  const auto& all = presets();
  const auto it = std::find_if(all.begin(), all.end(), [&](const PresetInfo& p) { return p.name == name; });
  if (it == all.end()) fail("experiment", "unknown preset '" + name + "'");

  json j = it->defaults;
  j.merge_patch(user);
  // Grids are replaced whole; merging {start, stop, count} into a preset's
  // {start, stop, step} would leave both.
  for (const char* key : {"detunings", "xi"}) {
    if (user.contains(key)) j[key] = user[key];
  }
  check_keys(j, "", {"experiment", "output", "solver", "series", "correlations", "detunings", "drive", "xi", "coupling"});

  ExperimentConfig c;
  c.experiment = name;
  c.output = get_string(j["output"], "output");
  if (c.output.empty()) fail("output", "must not be empty");
  c.solver = parse_solver(j.value("solver", json::object()));
  if (!j.contains("series") || !j["series"].is_array() || j["series"].empty()) {
    fail("series", "expected a nonempty array");
  }
  for (std::size_t k = 0; k < j["series"].size(); ++k) {
    c.series.push_back(parse_series(j["series"][k], "series[" + std::to_string(k) + "]", name));
  }
  if (j.contains("correlations")) {
    if (!j["correlations"].is_array()) fail("correlations", "expected an array");
    for (std::size_t k = 0; k < j["correlations"].size(); ++k) {
      c.correlations.push_back(parse_correlation(j["correlations"][k], "correlations[" + std::to_string(k) + "]"));
    }
  }
  if (j.contains("detunings")) c.detunings = get_grid(j["detunings"], "detunings");
  if (name == "fig5" && c.detunings.empty()) fail("detunings", "missing");
  if (j.contains("drive")) {
    const json& d = j["drive"];
    check_keys(d, "drive", {"rabi", "pattern"});
    if (d.contains("rabi")) {
      c.rabi = get_number(d["rabi"], "drive.rabi");
      if (c.rabi < 0.0) fail("drive.rabi", "must be >= 0");
    }
    if (d.contains("pattern")) {
      try {
        c.pattern = drive_pattern_from_string(get_string(d["pattern"], "drive.pattern"));
      } catch (const ValidationError& e) {
        fail("drive.pattern", e.what());
      }
    }
  }
  if (j.contains("xi")) {
    c.xi = get_grid(j["xi"], "xi");
    for (std::size_t k = 0; k < c.xi.size(); ++k) {
      if (!(c.xi[k] > 0.0)) fail("xi[" + std::to_string(k) + "]", "must be > 0");
    }
  }
  if (name == "fig7" && c.xi.empty()) fail("xi", "missing");
  if (j.contains("coupling")) c.coupling = get_positive(j["coupling"], "coupling");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["output"] = c.output;
  j["solver"] = {{"dense_cap", c.solver.dense_cap},
                 {"tie_tolerance", c.solver.tie_tolerance},
                 {"residual_tolerance", c.solver.residual_tolerance},
                 {"steady_state", std::string(to_string(c.solver.steady_state))},
                 {"steady_tolerance", c.solver.steady_tolerance},
                 {"krylov_restart", c.solver.krylov_restart}};
  j["series"] = json::array();
  for (const auto& s : c.series) {
    json lattices = json::array();
    for (auto shape : s.lattices) lattices.push_back(shape_json(shape));
    j["series"].push_back({{"label", s.label},
                           {"model", std::string(to_string(s.model))},
                           {"spacings", grid_json(s.spacings)},
                           {"lattices", lattices}});
  }
  j["correlations"] = json::array();
  for (const auto& cs : c.correlations) {
    j["correlations"].push_back({{"lattice", shape_json(cs.lattice)},
                                 {"anchor", shape_json(cs.anchor)},
                                 {"direction", shape_json(cs.direction)},
                                 {"state", cs.state},
                                 {"model", std::string(to_string(cs.model))},
                                 {"spacing", cs.spacing}});
  }
  if (!c.detunings.empty()) j["detunings"] = grid_json(c.detunings);
  j["drive"] = {{"rabi", c.rabi}, {"pattern", std::string(to_string(c.pattern))}};
  if (!c.xi.empty()) j["xi"] = grid_json(c.xi);
  j["coupling"] = c.coupling;
  return j;
}

RunSummary run_experiment(const ExperimentConfig& config) {
  RunSummary summary;
  const Writer write{config, summary};
  const std::string& e = config.experiment;
  if (e == "fig2") run_fig2(config, summary, write);
  else if (e == "fig3") run_fidelity_series(config, summary, write, true);
  else if (e == "fig4") run_fig4(config, summary, write);
  else if (e == "fig5") run_fig5(config, summary, write);
  else if (e == "fig6") run_fig6(config, summary, write);
  else if (e == "fig7") run_fig7(config, summary, write);
  else if (e == "fig8") run_fig8(config, summary, write);
  else throw ValidationError("field 'experiment': unknown preset '" + e + "'");
  return summary;
}

RvbComparison compare_least_radiant(const Lattice& lattice, const GreensModel& model,
                                    const SpectralOptions& options, const StateVector* rvb) {
  const SectorBasis basis(lattice.size(), lattice.size() / 2);
  if (lattice.size() % 2) throw ValidationError("half filling needs an even number of sites");
  StateVector reference = rvb ? *rvb : rvb_state(enumerate_coverings(lattice), basis);
  const auto h = assemble_hamiltonian(lattice, model, basis);
  auto lr = least_radiant(h, &reference, options);
  const double f = fidelity(reference, lr.state);
  return {std::move(reference), std::move(lr), f};
}

GroundComparison compare_ground_state(const Lattice& lattice, const GreensModel& model,
                                      const SpectralOptions& options) {
  if (lattice.size() % 2) throw ValidationError("half filling needs an even number of sites");
  const SectorBasis basis(lattice.size(), lattice.size() / 2);
  StateVector reference = rvb_state(enumerate_coverings(lattice), basis);
  const auto h = assemble_hamiltonian(lattice, model, basis);
  auto gs = ground_state(h, &reference, options);
  const double f = fidelity(reference, gs.state);
  return {std::move(reference), std::move(gs), f};
}

std::vector<int> long_edge_partition(const Lattice& lattice) {
  std::vector<int> out;
  for (int i = 0; i < lattice.size(); ++i) {
    if (lattice.ix(i) == 0) out.push_back(i);
  }
  return out;
}

std::vector<int> short_edge_partition(const Lattice& lattice) {
  std::vector<int> out;
  for (int i = 0; i < lattice.size(); ++i) {
    if (2 * lattice.iy(i) < lattice.ny() - (lattice.ny() % 2)) out.push_back(i);
  }
  return out;
}

}  // namespace dimerlab
