#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dimerlab/errors.hpp"
#include "dimerlab/experiment.hpp"
#include "dimerlab/io.hpp"

using namespace dimerlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string error_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dimerlab_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("every preset parses and its echo round-trips") {
  REQUIRE(presets().size() == 7);
  for (const auto& p : presets()) {
    CAPTURE(p.name);
    const ExperimentConfig c = parse_config({{"experiment", p.name}});
    CHECK(c.experiment == p.name);
    CHECK_FALSE(c.series.empty());
    const json echo = to_json(c);
    CHECK(to_json(parse_config(echo)) == echo);
  }
}

TEST_CASE("preset parameters") {
  const auto fig5 = parse_config({{"experiment", "fig5"}});
  CHECK(fig5.rabi == 0.05);
  CHECK(fig5.pattern == DrivePattern::Checkerboard);
  CHECK(fig5.detunings.size() == 29);
  CHECK(fig5.detunings[3] == doctest::Approx(-0.05));
  const auto fig3 = parse_config({{"experiment", "fig3"}});
  CHECK(fig3.series[2].spacings == std::vector<double>{0.42});
  const auto fig7 = parse_config({{"experiment", "fig7"}});
  CHECK(fig7.xi.front() == 0.1);
}

TEST_CASE("user values override preset defaults") {
  const auto c = parse_config({{"experiment", "fig5"},
                               {"output", "elsewhere"},
                               {"drive", {{"pattern", "uniform"}}},
                               {"detunings", {{"start", 0.0}, {"stop", 1.0}, {"count", 5}}},
                               {"solver", {{"steady_state", "krylov"}, {"krylov_restart", 20}}}});
  CHECK(c.output == "elsewhere");
  CHECK(c.pattern == DrivePattern::Uniform);
  CHECK(c.rabi == 0.05);
  CHECK(c.detunings == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(c.solver.steady().method == SteadyStateMethod::Krylov);
  CHECK(c.solver.steady().krylov_restart == 20);
}

TEST_CASE("validation errors name the field") {
  const json zero = {{"experiment", "fig2"},
                     {"series", {{{"label", "a"}, {"model", "waveguide2d"}, {"spacings", {0.1, 0.0}}, {"lattices", {{2, 2}}}}}}};
  CHECK(error_of(zero).find("series[0].spacings[1]") != std::string::npos);
  CHECK(error_of({{"experiment", "fig9"}}).find("experiment") != std::string::npos);
  CHECK(error_of({{"experiment", "fig5"}, {"drive", {{"phase", 1}}}}).find("drive.phase") != std::string::npos);
  CHECK(error_of({{"experiment", "fig5"}, {"colour", 1}}).find("colour") != std::string::npos);
  CHECK(error_of({{"experiment", "fig5"}, {"detunings", json::array()}}).find("detunings") != std::string::npos);
  CHECK(error_of({{"experiment", "fig5"}, {"solver", {{"steady_tolerance", -1}}}}).find("solver.steady_tolerance") !=
        std::string::npos);
  const json odd = {{"experiment", "fig3"},
                    {"series", {{{"label", "a"}, {"model", "waveguide2d"}, {"spacings", {0.1}}, {"lattices", {{3, 3}}}}}}};
  CHECK(error_of(odd).find("series[0].lattices[0]") != std::string::npos);
  const json bg = {{"experiment", "fig2"},
                   {"series", {{{"label", "a"}, {"model", "bandgap2d"}, {"spacings", {0.1}}, {"lattices", {{2, 2}}}}}}};
  CHECK(error_of(bg).find("series[0].model") != std::string::npos);
  CHECK(error_of({{"experiment", "fig7"}, {"xi", {1.0, -2.0}}}).find("xi[1]") != std::string::npos);
  CHECK(error_of({{"experiment", "fig5"}, {"detunings", {{"start", 0.0}, {"stop", 1.0}}}}).find("detunings") !=
        std::string::npos);
  CHECK_THROWS_AS(parse_config(json::array()), ValidationError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ValidationError);
}

TEST_CASE("malformed JSON file is a validation error") {
  const fs::path dir = scratch("malformed");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << "{\"experiment\": ";
  CHECK_THROWS_AS(load_config(dir / "bad.json"), ValidationError);
  fs::remove_all(dir);
}

TEST_CASE("CSV formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(1.0 / 3.0) == "0.333333333333");
  CHECK(format_double(std::nan("")) == "nan");
  CsvTable t;
  t.header = {"a", "b", "c"};
  t.add_row({1.5, 2LL, std::string("x")});
  CHECK(t.render() == "a,b,c\n1.5,2,x\n");
  CHECK_THROWS_AS(t.add_row({1.0}), ValidationError);
}

TEST_CASE("atomic writes create directories and replace files") {
  const fs::path dir = scratch("atomic");
  write_atomic(dir / "sub" / "f.txt", "one");
  write_atomic(dir / "sub" / "f.txt", "two");
  CHECK(slurp(dir / "sub" / "f.txt") == "two");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "sub")) ++entries;
  CHECK(entries == 1);
  fs::remove_all(dir);
}

TEST_CASE("small runs write CSV plus sidecar, deterministically") {
  const fs::path dir = scratch("run");
  json user = {{"experiment", "fig6"},
               {"output", (dir / "a").string()},
               {"series", {{{"label", "fs"}, {"model", "freespace2d"}, {"spacings", {0.42}}, {"lattices", {{2, 2}, {2, 3}}}}}}};
  const auto first = run_experiment(parse_config(user));
  REQUIRE(first.files.size() == 1);
  const fs::path csv = first.files[0];
  CHECK(csv.filename() == "fig6_fs.csv");
  const json side = json::parse(slurp(fs::path(csv).replace_extension(".json")));
  CHECK(side["version"].get<std::string>() == std::string(version()));
  CHECK(side["columns"][0] == "N");
  CHECK(side["config"] == to_json(parse_config(user)));
  CHECK(side.contains("residuals"));
  CHECK(first.max_eigen_residual < 1e-8);

  user["output"] = (dir / "b").string();
  const auto second = run_experiment(parse_config(user));
  CHECK(slurp(first.files[0]) == slurp(second.files[0]));
  const std::string text = slurp(csv);
  CHECK(text.rfind("N,nx,ny,k0d_over_pi,gamma_s1,dimer_bound,bound_holds\n4,2,2,0.42,", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("fig8 coverings table") {
  const fs::path dir = scratch("fig8");
  json user = {{"experiment", "fig8"},
               {"output", dir.string()},
               {"series", {{{"label", "coverings"}, {"model", "waveguide2d"}, {"spacings", {0.1}}, {"lattices", {{2, 4}, {4, 4}}}}}}};
  run_experiment(parse_config(user));
  CHECK(slurp(dir / "fig8_coverings.csv") == "nx,ny,N,count,oracle_count\n2,4,8,5,5\n4,4,16,36,36\n");
  fs::remove_all(dir);
}

TEST_CASE("helpers") {
  const Lattice ladder = make_lattice({2, 6}, 0.1);
  CHECK(ladder.kind() == LatticeKind::Square);
  CHECK(make_lattice({6, 1}, 0.1).kind() == LatticeKind::Chain);
  CHECK(long_edge_partition(ladder) == std::vector<int>{0, 2, 4, 6, 8, 10});
  CHECK(short_edge_partition(ladder) == std::vector<int>{0, 1, 2, 3, 4, 5});
}
