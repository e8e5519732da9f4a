// dimerlab: batch runner for the figure presets.
//
//   dimerlab run <config.json>
//   dimerlab validate <config.json>
//   dimerlab presets
//
// Exit codes: 0 ok, 2 validation, 3 capacity, 4 solver, 1 anything else.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dimerlab/errors.hpp"
#include "dimerlab/experiment.hpp"
#include "dimerlab/io.hpp"

namespace {

enum Exit { kOk = 0, kOther = 1, kValidation = 2, kCapacity = 3, kSolver = 4 };

template <typename F>
int guarded(F&& body) {
  try {
    body();
    return kOk;
  } catch (const dimerlab::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const dimerlab::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kCapacity;
  } catch (const dimerlab::SolverError& e) {
    std::cerr << "solver error: " << e.what();
    if (e.residual() >= 0.0) std::cerr << " (residual " << e.residual() << ")";
    std::cerr << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimerization of atomic arrays: figure experiment runner"};
  app.set_version_flag("--version", std::string(dimerlab::version()));
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment config and write CSV/JSON artifacts");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  std::string output_override;
  run->add_option("-o,--output", output_override, "Override the output directory");

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config_path, "Experiment config (JSON)")->required();

  auto* list = app.add_subcommand("presets", "List built-in figure presets and their parameters");
  bool as_json = false;
  list->add_flag("--json", as_json, "Print the full preset defaults as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  if (*list) {
    return guarded([&] {
      if (as_json) {
        nlohmann::json all = nlohmann::json::object();
        for (const auto& p : dimerlab::presets()) all[p.name] = p.defaults;
        std::cout << all.dump(2) << '\n';
        return;
      }
      for (const auto& p : dimerlab::presets()) {
        std::cout << p.name << "  " << p.description << '\n';
        for (const auto& s : p.defaults["series"]) {
          std::cout << "    " << s["label"].get<std::string>() << ": " << s["model"].get<std::string>()
                    << ", k0d/pi " << s["spacings"].dump() << ", lattices " << s["lattices"].dump() << '\n';
        }
      }
    });
  }

  if (*validate) {
    return guarded([&] {
      const auto config = dimerlab::load_config(config_path);
      std::cout << "ok: " << config.experiment << " -> " << config.output << '\n';
    });
  }

  return guarded([&] {
    auto config = dimerlab::load_config(config_path);
    if (!output_override.empty()) config.output = output_override;
    const auto summary = dimerlab::run_experiment(config);
    for (const auto& f : summary.files) std::cout << f.string() << '\n';
    std::cerr << "max relative eigen residual " << summary.max_eigen_residual
              << ", max relative steady-state residual " << summary.max_steady_residual << '\n';
  });
}
