#include "gpc/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gpc/errors.hpp"
#include "gpc/field_io.hpp"

namespace gpc {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(field, "must be finite");
  return v;
}

int integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<int>();
}

std::string text(const json& j, const std::string& field) {
  if (!j.is_string()) fail(field, "expected a string");
  return j.get<std::string>();
}

Vec2 point(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) fail(field, "expected [x, y]");
  return {number(j[0], field + "[0]"), number(j[1], field + "[1]")};
}

void only_keys(const json& j, const std::string& field, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(field, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) fail(field.empty() ? it.key() : field + "." + it.key(), "unknown field");
  }
}

Background parse_background(const json& g, const std::filesystem::path& base) {
  only_keys(g, "potential.g", {"kind", "omega", "center", "file"});
  if (!g.contains("kind")) fail("potential.g.kind", "missing");
  const std::string kind = text(g["kind"], "potential.g.kind");
  if (kind == "zero") return ZeroBackground{};
  if (kind == "harmonic") {
    HarmonicBackground h;
    if (g.contains("omega")) h.omega = number(g["omega"], "potential.g.omega");
    if (g.contains("center")) h.center = point(g["center"], "potential.g.center");
    return h;
  }
  if (kind == "tabulated") {
    if (!g.contains("file")) fail("potential.g.file", "missing for a tabulated background");
    const std::filesystem::path file = base / text(g["file"], "potential.g.file");
    try {
      return TabulatedBackground{std::make_shared<const Field2D>(load_field(file))};
    } catch (const std::exception& e) {
      fail("potential.g.file", e.what());
    }
  }
  fail("potential.g.kind", "expected zero, harmonic, or tabulated, got '" + kind + "'");
}

PotentialSpec parse_potential(const json& j, const std::filesystem::path& base) {
  only_keys(j, "potential", {"g", "points", "reg_delta"});
  Background bg = ZeroBackground{};
  if (j.contains("g")) bg = parse_background(j["g"], base);
  std::vector<SingularPoint> pts;
  if (j.contains("points")) {
    if (!j["points"].is_array()) fail("potential.points", "expected an array");
    for (std::size_t k = 0; k < j["points"].size(); ++k) {
      const std::string f = "potential.points[" + std::to_string(k) + "]";
      const json& e = j["points"][k];
      only_keys(e, f, {"x", "p", "h"});
      for (const char* key : {"x", "p", "h"}) {
        if (!e.contains(key)) fail(f + "." + key, "missing");
      }
      pts.push_back({point(e["x"], f + ".x"), number(e["p"], f + ".p"), number(e["h"], f + ".h")});
    }
  }
  std::optional<double> reg;
  if (j.contains("reg_delta") && !j["reg_delta"].is_null()) {
    reg = number(j["reg_delta"], "potential.reg_delta");
  }
  try {
    return PotentialSpec(std::move(bg), std::move(pts), reg);
  } catch (const std::invalid_argument& e) {
    fail("potential", e.what());
  }
}

Initialization parse_init(const json& j, const std::filesystem::path& base) {
  only_keys(j, "solver.init", {"kind", "center", "width", "scale", "file"});
  if (!j.contains("kind")) fail("solver.init.kind", "missing");
  const std::string kind = text(j["kind"], "solver.init.kind");
  const Vec2 c = j.contains("center") ? point(j["center"], "solver.init.center") : Vec2{};
  if (kind == "gaussian") {
    return GaussianInit{c, j.contains("width") ? number(j["width"], "solver.init.width") : 1.0};
  }
  if (kind == "townes") {
    return TownesInit{c, j.contains("scale") ? number(j["scale"], "solver.init.scale") : 1.0};
  }
  if (kind == "field") {
    if (!j.contains("file")) fail("solver.init.file", "missing");
    try {
      return FieldInit{std::make_shared<const Field2D>(
          load_field(base / text(j["file"], "solver.init.file")))};
    } catch (const std::exception& e) {
      fail("solver.init.file", e.what());
    }
  }
  fail("solver.init.kind", "expected gaussian, townes, or field");
}

void parse_solver(const json& j, RunConfig& cfg, const std::filesystem::path& base) {
  only_keys(j, "solver", {"tau", "max_iters", "residual_tol", "relative_residual_tol", "stencil",
                          "sampling", "preconditioner", "init", "warm_start"});
  SolveOptions& s = cfg.solver;
  if (j.contains("tau")) s.tau = number(j["tau"], "solver.tau");
  if (j.contains("max_iters")) s.max_iters = integer(j["max_iters"], "solver.max_iters");
  if (j.contains("residual_tol")) s.residual_tol = number(j["residual_tol"], "solver.residual_tol");
  if (j.contains("relative_residual_tol")) {
    cfg.sweep.relative_residual_tol = number(j["relative_residual_tol"], "solver.relative_residual_tol");
  }
  if (j.contains("stencil")) {
    const std::string v = text(j["stencil"], "solver.stencil");
    if (v == "second") s.stencil = Stencil::second_order;
    else if (v == "fourth") s.stencil = Stencil::fourth_order;
    else fail("solver.stencil", "expected second or fourth");
  }
  if (j.contains("sampling")) {
    const std::string v = text(j["sampling"], "solver.sampling");
    if (v == "point") s.sampling = PotentialSampling::point;
    else if (v == "cell_average") s.sampling = PotentialSampling::cell_average;
    else fail("solver.sampling", "expected point or cell_average");
  }
  if (j.contains("preconditioner")) {
    const std::string v = text(j["preconditioner"], "solver.preconditioner");
    if (v == "none") s.preconditioner = Preconditioner::none;
    else if (v == "sobolev") s.preconditioner = Preconditioner::sobolev;
    else fail("solver.preconditioner", "expected none or sobolev");
  }
  if (j.contains("init")) s.init = parse_init(j["init"], base);
  if (j.contains("warm_start")) {
    if (!j["warm_start"].is_boolean()) fail("solver.warm_start", "expected true or false");
    cfg.sweep.warm_start = j["warm_start"].get<bool>();
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    fail("solver", e.what());
  }
}

std::size_t line_of(const std::string& src, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t k = 0; k < std::min(byte, src.size()); ++k) line += src[k] == '\n';
  return line;
}

}  // namespace

std::vector<double> Schedule::resolve(double astar) const {
  std::vector<double> a(entries);
  if (kind == Kind::ratios) {
    for (auto& v : a) v *= astar;
  }
  return a;
}

Schedule default_schedule() { return {Schedule::Kind::ratios, {0.90, 0.95, 0.98, 0.99, 0.995}}; }

Schedule parse_schedule(const std::string& spec) {
  if (spec == "default") return default_schedule();
  auto parse_list = [](const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ConfigError("schedule: bad number '" + item + "'");
      }
    }
    if (out.empty()) throw ConfigError("schedule: empty list");
    return out;
  };
  if (spec.rfind("values:", 0) == 0) return {Schedule::Kind::values, parse_list(spec.substr(7))};
  if (spec.rfind("geometric:", 0) == 0) {
    std::string rest = spec.substr(10);
    for (auto& ch : rest) ch = ch == ':' ? ',' : ch;
    const auto v = parse_list(rest);
    if (v.size() != 3 || !(v[0] > v[1] && v[1] > 0.0 && v[0] < 1.0) || v[2] < 2 ||
        v[2] != std::floor(v[2])) {
      throw ConfigError("schedule: geometric needs g0 > g1 > 0, g0 < 1 and an integer count >= 2");
    }
    const int count = static_cast<int>(v[2]);
    Schedule s{Schedule::Kind::ratios, {}};
    for (int k = 0; k < count; ++k) {
      s.entries.push_back(1.0 - v[0] * std::pow(v[1] / v[0], static_cast<double>(k) / (count - 1)));
    }
    return s;
  }
  return {Schedule::Kind::ratios, parse_list(spec)};
}

RunConfig parse_config(const std::string& src, const std::filesystem::path& base) {
  json j;
  try {
    j = json::parse(src);
  } catch (const json::parse_error& e) {
    throw ConfigError("line " + std::to_string(line_of(src, e.byte)) + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected a JSON object at the top level");
  if (j.empty()) throw ConfigError("config: empty configuration");
  only_keys(j, "", {"potential", "g", "points", "reg_delta", "grid", "solver", "schedule", "output", "plot"});
  RunConfig cfg;
  if (j.contains("potential")) {
    if (j.contains("points") || j.contains("g") || j.contains("reg_delta")) {
      throw ConfigError("potential: given both as a block and at the top level");
    }
    cfg.potential = parse_potential(j["potential"], base);
  } else if (j.contains("points") || j.contains("g")) {
    json block = json::object();
    for (const char* k : {"g", "points", "reg_delta"}) {
      if (j.contains(k)) block[k] = j[k];
    }
    cfg.potential = parse_potential(block, base);
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    only_keys(g, "grid", {"L", "n", "widths", "max_half_width", "min_cells_per_width"});
    if (g.contains("L")) cfg.grid.half_width = number(g["L"], "grid.L");
    if (g.contains("n")) cfg.grid.n = integer(g["n"], "grid.n");
    if (!(cfg.grid.half_width > 0.0)) fail("grid.L", "must be positive");
    if (cfg.grid.n < 16) fail("grid.n", "must be at least 16");
    cfg.sweep.grid.n = cfg.grid.n;
    cfg.sweep.grid.max_half_width = cfg.grid.half_width;
    if (g.contains("max_half_width")) {
      cfg.sweep.grid.max_half_width = number(g["max_half_width"], "grid.max_half_width");
    }
    if (g.contains("widths")) cfg.sweep.grid.widths = number(g["widths"], "grid.widths");
    if (g.contains("min_cells_per_width")) {
      cfg.sweep.grid.min_cells_per_width = number(g["min_cells_per_width"], "grid.min_cells_per_width");
    }
    if (!(cfg.sweep.grid.widths > 0.0)) fail("grid.widths", "must be positive");
  }
  if (j.contains("solver")) parse_solver(j["solver"], cfg, base);
  cfg.sweep.solve = cfg.solver;
  if (j.contains("schedule")) {
    const json& s = j["schedule"];
    if (s.is_string()) {
      cfg.schedule = parse_schedule(s.get<std::string>());
    } else if (s.is_object()) {
      only_keys(s, "schedule", {"ratios", "values"});
      if (s.size() != 1) fail("schedule", "give exactly one of ratios or values");
      const bool ratios = s.contains("ratios");
      const json& list = ratios ? s["ratios"] : s["values"];
      const std::string f = ratios ? "schedule.ratios" : "schedule.values";
      if (!list.is_array() || list.empty()) fail(f, "expected a nonempty array");
      Schedule sch{ratios ? Schedule::Kind::ratios : Schedule::Kind::values, {}};
      for (std::size_t k = 0; k < list.size(); ++k) {
        sch.entries.push_back(number(list[k], f + "[" + std::to_string(k) + "]"));
      }
      cfg.schedule = sch;
    } else {
      fail("schedule", "expected a string or an object");
    }
  }
  if (j.contains("output")) cfg.output = text(j["output"], "output");
  if (j.contains("plot")) {
    if (!j["plot"].is_boolean()) fail("plot", "expected true or false");
    cfg.plot = j["plot"].get<bool>();
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace gpc
