#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "gpc/config.hpp"
#include "gpc/errors.hpp"
#include "gpc/field_io.hpp"

using namespace gpc;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("a full configuration") {
  const RunConfig c = parse_config(R"({
    "potential": {
      "g": {"kind": "harmonic", "omega": 0.5, "center": [1, 2]},
      "points": [{"x": [0, 0], "p": 1, "h": -1}, {"x": [3, 0], "p": 0.5, "h": -2}],
      "reg_delta": 0.01
    },
    "grid": {"L": 6, "n": 128, "widths": 10, "min_cells_per_width": 3},
    "solver": {"tau": 0.5, "max_iters": 100, "residual_tol": 1e-6, "stencil": "second",
               "sampling": "point", "preconditioner": "none", "relative_residual_tol": 1e-7,
               "init": {"kind": "gaussian", "center": [1, 0], "width": 2}, "warm_start": false},
    "schedule": {"ratios": [0.9, 0.99]},
    "output": "out",
    "plot": false
  })");
  REQUIRE(c.potential);
  CHECK(c.potential->points().size() == 2);
  CHECK(c.potential->reg_delta().value() == 0.01);
  const auto& h = std::get<HarmonicBackground>(c.potential->background());
  CHECK(h.omega == 0.5);
  CHECK(h.center == Vec2{1, 2});
  CHECK(c.grid.half_width == 6.0);
  CHECK(c.grid.n == 128);
  CHECK(c.sweep.grid.n == 128);
  CHECK(c.sweep.grid.max_half_width == 6.0);
  CHECK(c.sweep.grid.widths == 10.0);
  CHECK(c.sweep.grid.min_cells_per_width == 3.0);
  CHECK(c.solver.tau.value() == 0.5);
  CHECK(c.solver.max_iters == 100);
  CHECK(c.solver.stencil == Stencil::second_order);
  CHECK(c.solver.sampling == PotentialSampling::point);
  CHECK(c.solver.preconditioner == Preconditioner::none);
  CHECK(std::get<GaussianInit>(c.solver.init).width == 2.0);
  CHECK(c.sweep.relative_residual_tol == 1e-7);
  CHECK_FALSE(c.sweep.warm_start);
  CHECK(c.sweep.solve.max_iters == 100);
  CHECK(c.schedule->kind == Schedule::Kind::ratios);
  CHECK(c.schedule->entries == std::vector<double>{0.9, 0.99});
  CHECK(c.output == "out");
  CHECK_FALSE(c.plot);
}

TEST_CASE("potential at the top level and defaults") {
  const RunConfig c = parse_config(R"({"points": [{"x": [0, 0], "p": 1, "h": -1}]})");
  REQUIRE(c.potential);
  CHECK(std::holds_alternative<ZeroBackground>(c.potential->background()));
  CHECK(c.grid.n == 256);
  CHECK(c.solver.stencil == Stencil::fourth_order);
  CHECK_FALSE(c.schedule);
  CHECK(c.plot);
}

TEST_CASE("errors name the line or the field") {
  CHECK(contains(error_of(""), "line 1"));
  CHECK(contains(error_of("{\n\"grid\": {\n\"n\": ,\n}}"), "line 3"));
  CHECK(contains(error_of("{}"), "empty"));
  CHECK(contains(error_of("[1, 2]"), "object"));
  CHECK(contains(error_of(R"({"grid": {"n": 8}})"), "grid.n"));
  CHECK(contains(error_of(R"({"grid": {"n": 64.5}})"), "grid.n"));
  CHECK(contains(error_of(R"({"grid": {"L": -1}})"), "grid.L"));
  CHECK(contains(error_of(R"({"grid": {"size": 3}})"), "grid.size"));
  CHECK(contains(error_of(R"({"colour": 3})"), "colour"));
  CHECK(contains(error_of(R"({"points": [{"x": [0, 0], "p": 1}]})"), "potential.points[0].h"));
  CHECK(contains(error_of(R"({"points": [{"x": [0], "p": 1, "h": -1}]})"), "potential.points[0].x"));
  CHECK(contains(error_of(R"({"points": [{"x": [0, 0], "p": 3, "h": -1}]})"), "potential"));
  CHECK(contains(error_of(R"({"potential": {"g": {"kind": "cubic"}}})"), "potential.g.kind"));
  CHECK(contains(error_of(R"({"potential": {"points": []}, "points": []})"), "potential"));
  CHECK(contains(error_of(R"({"solver": {"stencil": "sixth"}})"), "solver.stencil"));
  CHECK(contains(error_of(R"({"solver": {"tau": -1}})"), "solver"));
  CHECK(contains(error_of(R"({"solver": {"init": {"kind": "field"}}})"), "solver.init.file"));
  CHECK(contains(error_of(R"({"schedule": {"ratios": [0.9], "values": [1]}})"), "schedule"));
  CHECK(contains(error_of(R"({"schedule": {"ratios": ["x"]}})"), "schedule.ratios[0]"));
  CHECK(contains(error_of(R"({"plot": 1})"), "plot"));
}

TEST_CASE("schedule strings") {
  CHECK(parse_schedule("default").entries == default_schedule().entries);
  CHECK(default_schedule().entries == std::vector<double>{0.90, 0.95, 0.98, 0.99, 0.995});
  const Schedule r = parse_schedule("0.5,0.75");
  CHECK(r.kind == Schedule::Kind::ratios);
  CHECK(r.resolve(10.0) == std::vector<double>{5.0, 7.5});
  const Schedule v = parse_schedule("values:1,2.5");
  CHECK(v.kind == Schedule::Kind::values);
  CHECK(v.resolve(10.0) == std::vector<double>{1.0, 2.5});
  const Schedule g = parse_schedule("geometric:0.1:0.001:3");
  REQUIRE(g.entries.size() == 3);
  CHECK(g.entries[0] == doctest::Approx(0.9));
  CHECK(g.entries[1] == doctest::Approx(0.99));
  CHECK(g.entries[2] == doctest::Approx(0.999));
  CHECK_THROWS_AS(parse_schedule(""), ConfigError);
  CHECK_THROWS_AS(parse_schedule("0.9,abc"), ConfigError);
  CHECK_THROWS_AS(parse_schedule("geometric:0.001:0.1:3"), ConfigError);
  CHECK_THROWS_AS(parse_schedule("geometric:0.1:0.01:2.5"), ConfigError);
}

TEST_CASE("files are resolved relative to the configuration") {
  const fs::path dir = fs::temp_directory_path() / "gpc_config_test";
  fs::create_directories(dir / "data");
  const Grid2D g(3.0, 16);
  save_field(dir / "data" / "bg.bin", Field2D::from_function(g, [](Vec2 x) { return 1.0 + x.x * x.x; }));
  std::ofstream(dir / "run.json")
      << R"({"potential": {"g": {"kind": "tabulated", "file": "data/bg.bin"}, "points": []}})";
  const RunConfig c = load_config(dir / "run.json");
  REQUIRE(c.potential);
  CHECK(std::holds_alternative<TabulatedBackground>(c.potential->background()));

  std::ofstream(dir / "broken.json")
      << R"({"potential": {"g": {"kind": "tabulated", "file": "nope.bin"}}})";
  try {
    load_config(dir / "broken.json");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(contains(e.what(), "broken.json"));
    CHECK(contains(e.what(), "potential.g.file"));
  }
  CHECK_THROWS_AS(load_config(dir / "absent.json"), ConfigError);
}
