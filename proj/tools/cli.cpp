#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gpc/closedform.hpp"
#include "gpc/collapse.hpp"
#include "gpc/config.hpp"
#include "gpc/errors.hpp"
#include "gpc/field_io.hpp"
#include "gpc/minimizer.hpp"
#include "gpc/potential.hpp"
#include "gpc/svg.hpp"

namespace gpc::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json finite(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path.string() + ": cannot open for writing");
  f << text;
  if (!f) throw std::runtime_error(path.string() + ": write failed");
}

TownesSolution solution_from(const std::string& profile_path) {
  if (profile_path.empty()) return default_townes();
  auto profile = std::make_shared<const RadialProfile>(read_profile_csv(profile_path));
  return {profile, critical_constants(*profile)};
}

PotentialSpec require_potential(const RunConfig& cfg) {
  if (!cfg.potential) throw ConfigError("potential: missing");
  return *cfg.potential;
}

const char* background_kind(const Background& bg) {
  switch (bg.index()) {
    case 0: return "zero";
    case 1: return "harmonic";
    default: return "tabulated";
  }
}

// ---------------------------------------------------------------- q-solve

struct QSolveArgs {
  std::string out = "q.csv";
  TownesOptions options{};
  std::vector<double> moments{0.5, 1.0, 1.5};
};

int q_solve(const QSolveArgs& args, std::ostream& out) {
  const RadialProfile profile = solve_townes(args.options);
  const CriticalConstants c = critical_constants(profile);
  const fs::path csv(args.out);
  if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
  write_profile_csv(csv, profile);

  json moments = json::object();
  for (double p : args.moments) {
    std::ostringstream key;
    key << p;
    moments[key.str()] = singular_moment(profile, p);
  }
  const json j = {{"astar", c.astar},
                  {"mass", c.mass},
                  {"kinetic", c.kinetic},
                  {"quartic", c.quartic},
                  {"q0", profile.q0()},
                  {"rmax", profile.rmax()},
                  {"mesh_nodes", profile.nodes().size()},
                  {"ode_residual", ode_residual(profile)},
                  {"Ip", moments},
                  {"profile", csv.filename().string()}};
  const fs::path constants = csv.parent_path() / "constants.json";
  write_text(constants, j.dump(2) + "\n");
  out << "a* = " << num(c.astar) << "  Q(0) = " << num(profile.q0()) << "\n"
      << "wrote " << csv.string() << " and " << constants.string() << "\n";
  return kOk;
}

// -------------------------------------------------------------- constants

struct ConstantsArgs {
  std::string config;
  std::string from_profile;
  std::string out;
  double p = std::numeric_limits<double>::quiet_NaN();
  double h0 = std::numeric_limits<double>::quiet_NaN();
};

int constants(const ConstantsArgs& args, std::ostream& out) {
  double p = 1.0;
  double h0 = 1.0;
  if (!args.config.empty()) {
    const SelectionData sel = classify(require_potential(load_config(args.config)));
    p = sel.p;
    h0 = sel.h0;
  }
  if (!std::isnan(args.p)) p = args.p;
  if (!std::isnan(args.h0)) h0 = args.h0;

  const TownesSolution townes = solution_from(args.from_profile);
  const CollapseConstants c{p, h0, townes.constants.astar, singular_moment(*townes.profile, p)};
  c.validate();
  const LambdaMinimum lm = minimize_lambda(c);
  const json j = {{"astar", c.astar},
                  {"p", p},
                  {"h0", h0},
                  {"Ip", c.ip},
                  {"beta", beta_value(c)},
                  {"energy_limit", energy_limit(c)},
                  {"lambda_star", lm.lambda_star},
                  {"lambda_value", lm.value},
                  {"energy_exponent", -p / (2.0 - p)},
                  {"eps_exponent", 1.0 / (2.0 - p)}};
  const std::string text = j.dump(2) + "\n";
  if (!args.out.empty()) write_text(args.out, text);
  out << text;
  return kOk;
}

// -------------------------------------------------------- potential-check

int potential_check(const std::string& config, std::ostream& out) {
  const RunConfig cfg = load_config(config);
  const PotentialSpec spec = require_potential(cfg);
  const SelectionData sel = classify(spec);

  json points = json::array();
  const auto wells = negative_wells(spec);
  for (std::size_t j = 0; j < spec.points().size(); ++j) {
    const SingularPoint& s = spec.points()[j];
    bool candidate = false;
    for (std::size_t c : sel.candidates) candidate = candidate || c == j;
    points.push_back({{"index", j},
                      {"x", {s.x.x, s.x.y}},
                      {"p", s.p},
                      {"h", s.h},
                      {"well", s.h < 0.0},
                      {"candidate", candidate}});
  }
  const Grid2D grid(cfg.grid.half_width, cfg.grid.n);
  const auto v = sample_potential(spec, grid, cfg.solver.sampling);
  double vmin = v.front(), vmax = v.front();
  for (double x : v) {
    vmin = std::min(vmin, x);
    vmax = std::max(vmax, x);
  }
  const double sep = spec.min_separation();
  const json j = {{"p", sel.p},
                  {"h0", sel.h0},
                  {"candidates", sel.candidates},
                  {"negative_wells", wells.size()},
                  {"points", points},
                  {"background", background_kind(spec.background())},
                  {"min_separation", finite(sep)},
                  {"reg_delta", spec.reg_delta() ? json(*spec.reg_delta()) : json(nullptr)},
                  {"grid", {{"L", grid.half_width()}, {"n", grid.n()}, {"spacing", grid.spacing()}}},
                  {"sampled_min", vmin},
                  {"sampled_max", vmax}};
  out << j.dump(2) << "\n";
  return kOk;
}

// --------------------------------------------------------------- minimize

struct MinimizeArgs {
  std::string config;
  std::string out = "field.bin";
  std::string from_profile;
  double a = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
  bool history = false;
};

int minimize_cmd(const MinimizeArgs& args, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load_config(args.config);
  const PotentialSpec spec = require_potential(cfg);
  const double astar = solution_from(args.from_profile).constants.astar;
  const double a = std::isnan(args.a) ? args.ratio * astar : args.a;
  const Grid2D grid(cfg.grid.half_width, cfg.grid.n);
  const MinimizationResult res = minimize(grid, spec, a, cfg.solver);

  const fs::path field(args.out);
  if (field.has_parent_path()) fs::create_directories(field.parent_path());
  save_field(field, res.u);
  fs::path meta = field;
  meta.replace_extension(".json");
  const json j = {
      {"a", a},
      {"a_ratio", a / astar},
      {"astar", astar},
      {"grid", {{"L", grid.half_width()}, {"n", grid.n()}}},
      {"energy",
       {{"kinetic", res.energy.kinetic},
        {"potential", res.energy.potential},
        {"interaction", res.energy.interaction},
        {"total", res.energy.total},
        {"boundary_mass", res.energy.boundary_mass},
        {"boundary_warning", res.energy.boundary_warning}}},
      {"mu", res.mu},
      {"residual", res.residual},
      {"iters", res.iters},
      {"converged", res.converged},
      {"initial_energy", res.initial_energy},
      {"rejected_steps", res.rejected_steps},
      {"diagnostics", res.diagnostics},
      {"field", field.filename().string()}};
  write_text(meta, j.dump(2) + "\n");
  if (args.history) {
    fs::path hist = field;
    hist.replace_filename(field.stem().string() + "_history.csv");
    std::ostringstream csv;
    csv << "iter,energy,residual,tau,mass\n";
    for (std::size_t k = 0; k < res.history.size(); ++k) {
      const auto& h = res.history[k];
      csv << k + 1 << ',' << num(h.energy) << ',' << num(h.residual) << ',' << num(h.tau) << ','
          << num(h.mass) << '\n';
    }
    write_text(hist, csv.str());
  }
  out << "E = " << num(res.energy.total) << "  mu = " << num(res.mu)
      << "  residual = " << res.residual << "  iters = " << res.iters << "\n";
  if (res.energy.boundary_warning) err << "gpc: warning: mass near the grid boundary\n";
  if (!res.converged) {
    err << "gpc: minimize did not converge: " << res.diagnostics << "\n";
    return kNumeric;
  }
  return kOk;
}

// ---------------------------------------------------------- sweep, verify

struct SweepArgs {
  std::string config;
  std::string schedule;
  std::string out;
  std::string from_profile;
  bool no_plot = false;
};

std::string records_csv(const SweepResult& s) {
  std::ostringstream csv;
  csv << "a,a_ratio,eps_a,energy,scaled_energy,chosen_point,mass_fraction,collapsed,l2_err,"
         "h1_err,fitted_beta,residual,converged,trial_min,trial_ell,energy_point_sampling,"
         "half_width,spacing,refused,note\n";
  const double astar = s.context.constants.astar;
  for (const auto& r : s.records) {
    std::string note = r.note;
    for (std::size_t k = note.find('"'); k != std::string::npos; k = note.find('"', k + 2)) {
      note.insert(k, 1, '"');
    }
    csv << num(r.a) << ',' << num(r.a / astar) << ',' << num(r.eps_a) << ',' << num(r.energy)
        << ',' << num(r.scaled_energy) << ',' << r.chosen_point << ',' << num(r.mass_fraction)
        << ',' << int(r.collapsed) << ',' << num(r.l2_err) << ',' << num(r.h1_err) << ','
        << num(r.fitted_beta) << ',' << num(r.residual) << ',' << int(r.converged) << ','
        << num(r.trial_min) << ',' << num(r.trial_ell) << ',' << num(r.energy_point_sampling)
        << ',' << num(r.half_width) << ',' << num(r.spacing) << ',' << int(r.refused) << ",\""
        << note << "\"\n";
  }
  return csv.str();
}

std::string fit_json(const VerificationReport& rep) {
  const CollapseContext& ctx = rep.sweep.context;
  const double p = ctx.constants.p;
  json j = {{"expected_exponent", -p / (2.0 - p)}, {"energy_limit", ctx.limit}};
  if (rep.fit) {
    const PowerLawFit& f = *rep.fit;
    j["exponent"] = f.exponent;
    j["prefactor"] = f.prefactor;
    j["r2"] = f.r2;
    j["window"] = {f.a_min, f.a_max};
    j["exponent_rel_error"] = std::abs(f.exponent + p / (2.0 - p)) / (p / (2.0 - p));
    j["prefactor_rel_error"] = std::abs(f.prefactor - std::abs(ctx.limit)) / std::abs(ctx.limit);
  }
  if (rep.fit && rep.fit_point_sampling) {
    j["point_sampling"] = {{"exponent", rep.fit_point_sampling->exponent},
                           {"prefactor", rep.fit_point_sampling->prefactor}};
    j["prefactor_ratio"] = rep.fit_point_sampling->prefactor / rep.fit->prefactor;
  }
  return j.dump(2) + "\n";
}

void write_plots(const fs::path& dir, const VerificationReport& rep) {
  const SweepResult& s = rep.sweep;
  const CollapseContext& ctx = s.context;
  const double astar = ctx.constants.astar;
  const double p = ctx.constants.p;

  Series computed{"-E(a)", {}, {}, true};
  Series limit{"|limit| (a*-a)^(-p/(2-p))", {}, {}, false};
  Series fitted{"fit", {}, {}, false};
  Series h1{"H1 error", {}, {}, true};
  Series l2{"L2 error", {}, {}, true};
  for (const auto& r : s.records) {
    if (r.refused) continue;
    const double gap = astar - r.a;
    computed.x.push_back(gap);
    computed.y.push_back(-r.energy);
    limit.x.push_back(gap);
    limit.y.push_back(std::abs(ctx.limit) * std::pow(gap, -p / (2.0 - p)));
    if (rep.fit) {
      fitted.x.push_back(gap);
      fitted.y.push_back(rep.fit->prefactor * std::pow(gap, rep.fit->exponent));
    }
    h1.x.push_back(r.a / astar);
    h1.y.push_back(r.h1_err);
    l2.x.push_back(r.a / astar);
    l2.y.push_back(r.l2_err);
  }
  PlotSpec energy{"Ground state energy near a*", "a* - a", "-E(a)", true, true, {computed, limit}};
  if (rep.fit) energy.series.push_back(fitted);
  write_svg(dir / "energy.svg", energy);
  write_svg(dir / "profile_error.svg",
            {"Distance to the limiting profile", "a / a*", "error", false, true, {h1, l2}});

  if (s.last_rescaled) {
    const Field2D& w = *s.last_rescaled;
    const NormalizedProfile q0(ctx.profile, ctx.constants.astar);
    const double rmax = std::min(0.95 * w.grid().half_width(), 6.0 / ctx.beta);
    Series numeric{"rescaled minimizer", {}, {}, false};
    Series exact{"beta Q0(beta r)", {}, {}, false};
    const int samples = 200;
    for (int k = 0; k <= samples; ++k) {
      const double r = rmax * k / samples;
      numeric.x.push_back(r);
      numeric.y.push_back(interpolate(w, {r, 0.0}));
      exact.x.push_back(r);
      exact.y.push_back(ctx.beta * q0.value(ctx.beta * r));
    }
    write_svg(dir / "profile.svg",
              {"Rescaled minimizer at the last record", "r", "w(r, 0)", false, false,
               {numeric, exact}});
  }
}

int sweep_cmd(const SweepArgs& args, bool verify, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load_config(args.config);
  const PotentialSpec spec = require_potential(cfg);
  const TownesSolution townes = solution_from(args.from_profile);
  const Schedule schedule = !args.schedule.empty() ? parse_schedule(args.schedule)
                                                   : cfg.schedule.value_or(default_schedule());
  const auto a = schedule.resolve(townes.constants.astar);
  const fs::path dir = !args.out.empty() ? args.out : (!cfg.output.empty() ? cfg.output : "gpc_out");

  const VerificationReport rep = verify ? verify_theorem2(spec, a, cfg.sweep, {}, townes)
                                        : assess(sweep(spec, a, cfg.sweep, townes));
  fs::create_directories(dir);
  write_text(dir / "records.csv", records_csv(rep.sweep));
  write_text(dir / "fit.json", fit_json(rep));
  write_text(dir / "report.json", report_json(rep) + "\n");
  if (cfg.plot && !args.no_plot) write_plots(dir, rep);

  for (const auto& r : rep.sweep.records) {
    out << "a/a* = " << r.a / townes.constants.astar << "  E = " << num(r.energy)
        << "  h1 = " << r.h1_err << "  point = " << r.chosen_point << (r.refused ? "  refused" : "")
        << "\n";
  }
  if (rep.fit) {
    out << "fit: exponent " << rep.fit->exponent << "  prefactor " << rep.fit->prefactor
        << "  (|limit| " << std::abs(rep.sweep.context.limit) << ")\n";
  }
  for (const auto& c : rep.checks) {
    out << to_string(c.status) << "  " << c.name << "  value " << c.value << "  threshold "
        << c.threshold << "\n";
  }
  out << "wrote " << dir.string() << "\n";
  if (verify && !rep.pass) {
    err << "gpc: verification failed\n";
    return kNumeric;
  }
  return kOk;
}

}  // namespace

void write_profile_csv(const fs::path& path, const RadialProfile& profile) {
  std::ostringstream csv;
  csv << "r,Q,Qprime\n";
  for (std::size_t k = 0; k < profile.nodes().size(); ++k) {
    csv << num(profile.nodes()[k]) << ',' << num(profile.values()[k]) << ','
        << num(profile.derivs()[k]) << '\n';
  }
  write_text(path, csv.str());
}

RadialProfile read_profile_csv(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path.string() + ": cannot open");
  std::string line;
  std::getline(f, line);
  if (line.rfind("r,Q,Qprime", 0) != 0) {
    throw ConfigError(path.string() + ": line 1: expected header r,Q,Qprime");
  }
  std::vector<double> r, q, dq;
  std::size_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    const char* s = line.c_str();
    char* end = nullptr;
    double v[3];
    for (int k = 0; k < 3; ++k) {
      v[k] = std::strtod(s, &end);
      if (end == s || (k < 2 && *end != ',')) {
        throw ConfigError(path.string() + ": line " + std::to_string(lineno) + ": expected r,Q,Qprime");
      }
      s = end + 1;
    }
    r.push_back(v[0]);
    q.push_back(v[1]);
    dq.push_back(v[2]);
  }
  try {
    return RadialProfile(std::move(r), std::move(q), std::move(dq));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Collapse of Gross-Pitaevskii minimizers near singular potential wells", "gpc"};
  app.require_subcommand(1);

  QSolveArgs qa;
  auto* q = app.add_subcommand("q-solve", "Solve for the Townes profile and the critical constant");
  q->add_option("--out", qa.out, "Profile CSV (constants.json is written beside it)");
  q->add_option("--rmax", qa.options.rmax, "Outer radius of the mesh")->check(CLI::PositiveNumber);
  q->add_option("--tol", qa.options.tol, "Shooting tolerance on Q(0)")->check(CLI::PositiveNumber);
  q->add_option("--lo", qa.options.bracket.lo, "Lower end of the Q(0) bracket");
  q->add_option("--hi", qa.options.bracket.hi, "Upper end of the Q(0) bracket");
  q->add_option("--mesh", qa.options.mesh_intervals, "Number of mesh intervals");
  q->add_option("--moments", qa.moments, "Powers p for which I_p is reported");

  ConstantsArgs ca;
  auto* c = app.add_subcommand("constants", "Print a*, I_p, beta, and the energy limit");
  c->add_option("--config", ca.config, "Take p and h0 from this potential")->check(CLI::ExistingFile);
  c->add_option("--p", ca.p, "Singularity power");
  c->add_option("--h0", ca.h0, "Well depth");
  c->add_option("--from-profile", ca.from_profile, "Profile CSV written by q-solve")
      ->check(CLI::ExistingFile);
  c->add_option("--out", ca.out, "Also write the JSON here");

  std::string pc_config;
  auto* pc = app.add_subcommand("potential-check", "Classify the wells of a potential");
  pc->add_option("--config", pc_config, "Configuration file")->required()->check(CLI::ExistingFile);

  MinimizeArgs ma;
  auto* m = app.add_subcommand("minimize", "Minimize the energy for one interaction strength");
  m->add_option("--config", ma.config, "Configuration file")->required()->check(CLI::ExistingFile);
  auto* opt_a = m->add_option("--a", ma.a, "Interaction strength");
  auto* opt_ratio = m->add_option("--ratio", ma.ratio, "Interaction strength as a fraction of a*");
  opt_a->excludes(opt_ratio);
  m->add_option("--out", ma.out, "Field file (.bin or .csv); metadata goes to the .json beside it");
  m->add_option("--from-profile", ma.from_profile, "Profile CSV written by q-solve")
      ->check(CLI::ExistingFile);
  m->add_flag("--history", ma.history, "Write the per-iteration history CSV");

  SweepArgs sa;
  auto add_sweep = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->add_option("--config", sa.config, "Configuration file")->required()->check(CLI::ExistingFile);
    s->add_option("--schedule", sa.schedule,
                  "default | r1,r2,... | values:a1,a2,... | geometric:g0:g1:count");
    s->add_option("--out", sa.out, "Output directory");
    s->add_option("--from-profile", sa.from_profile, "Profile CSV written by q-solve")
        ->check(CLI::ExistingFile);
    s->add_flag("--no-plot", sa.no_plot, "Skip the SVG plots");
    return s;
  };
  auto* sw = add_sweep("sweep", "Sweep a toward a* and record the collapse");
  auto* ve = add_sweep("verify", "Sweep and check the collapse asymptotics; nonzero exit on failure");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (m->parsed() && opt_a->count() + opt_ratio->count() == 0) {
      throw CLI::RequiredError("--a or --ratio");
    }
    if (q->parsed()) return q_solve(qa, out);
    if (c->parsed()) return constants(ca, out);
    if (pc->parsed()) return potential_check(pc_config, out);
    if (m->parsed()) return minimize_cmd(ma, out, err);
    if (sw->parsed()) return sweep_cmd(sa, false, out, err);
    if (ve->parsed()) return sweep_cmd(sa, true, out, err);
    return kUsage;
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  } catch (const ConfigError& e) {
    err << "gpc: config error: " << e.what() << "\n";
    return kUsage;
  } catch (const HypothesisError& e) {
    err << "gpc: hypothesis violated: " << e.what() << "\n";
    return kHypothesis;
  } catch (const std::invalid_argument& e) {
    err << "gpc: invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    err << "gpc: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "gpc: numeric failure: " << e.what() << "\n";
    return kNumeric;
  }
}

}  // namespace gpc::cli
