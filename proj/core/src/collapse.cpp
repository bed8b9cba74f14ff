#include "gpc/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gpc/errors.hpp"

namespace gpc {
namespace {

struct Well {
  std::size_t index;
  Vec2 x;
  double p;
  double beta;
};

double collapse_eps(double astar, double a, double p) { return std::pow(astar - a, 1.0 / (2.0 - p)); }

Field2D dilated_profile(const Grid2D& grid, const NormalizedProfile& q0, double lambda) {
  return Field2D::from_function(grid, [&](Vec2 x) { return lambda * q0.value(lambda * norm(x)); });
}

// Golden-section search for the dilation of Q0 closest to w in L2.
double fit_dilation(const Field2D& w, const NormalizedProfile& q0, double beta) {
  auto cost = [&](double lambda) { return h1_l2_distance(w, dilated_profile(w.grid(), q0, lambda)).l2; };
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.5 * beta, hi = 2.0 * beta;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = cost(x1), f2 = cost(x2);
  while (hi - lo > 1e-7 * beta) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = cost(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = cost(x2);
    }
  }
  return 0.5 * (lo + hi);
}

// u(x) = w((x - c) / eps) / eps on grid, zero outside w's domain.
std::shared_ptr<const Field2D> transplant(const Field2D& w, Vec2 c, double eps, const Grid2D& grid) {
  return std::make_shared<const Field2D>(Field2D::from_function(grid, [&](Vec2 x) {
    const Vec2 y = (1.0 / eps) * (x - c);
    return w.grid().contains(y) ? interpolate(w, y) / eps : 0.0;
  }));
}

struct RunOutput {
  CandidateRun summary;
  std::optional<MinimizationResult> result;
  std::optional<Grid2D> grid;
};

}  // namespace

CollapseContext collapse_context(const PotentialSpec& spec, const TownesSolution& townes) {
  CollapseContext ctx;
  ctx.selection = classify(spec);
  ctx.profile = townes.profile;
  ctx.constants = CollapseConstants{ctx.selection.p, ctx.selection.h0, townes.constants.astar,
                                    singular_moment(*townes.profile, ctx.selection.p)};
  ctx.beta = beta_value(ctx.constants);
  ctx.limit = energy_limit(ctx.constants);
  return ctx;
}

Concentration locate_concentration(const Field2D& u, const PotentialSpec& spec) {
  const auto wells = negative_wells(spec);
  if (wells.empty()) throw HypothesisError("locate_concentration: no negative well");
  const double radius = 0.5 * spec.min_separation();
  Concentration best;
  best.mass_fraction = -1.0;
  for (std::size_t j : wells) {
    const double m = std::isfinite(radius) ? disc_mass(u, spec.points()[j].x, radius) : u.mass();
    if (m > best.mass_fraction) {
      best.index = j;
      best.mass_fraction = m;
    }
  }
  best.collapsed = best.mass_fraction >= 0.5;
  return best;
}

SweepResult sweep(const PotentialSpec& spec, const std::vector<double>& schedule,
                  const SweepOptions& opts, const TownesSolution& townes) {
  SweepResult out;
  out.context = collapse_context(spec, townes);
  const CollapseContext& ctx = out.context;
  const double astar = ctx.constants.astar;
  if (schedule.empty()) throw std::invalid_argument("sweep: empty schedule");
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k] > 0.0 && schedule[k] < astar)) {
      std::ostringstream msg;
      msg << "sweep: a = " << schedule[k] << " is outside (0, a* = " << astar << ")";
      throw std::invalid_argument(msg.str());
    }
    if (k > 0 && !(schedule[k] > schedule[k - 1])) {
      throw std::invalid_argument("sweep: schedule must be strictly increasing");
    }
  }
  if (opts.grid.n < 16 || !(opts.grid.widths > 0.0) || !(opts.grid.max_half_width > 0.0)) {
    throw std::invalid_argument("sweep: invalid grid policy");
  }

  const NormalizedProfile q0(townes.profile, townes.constants.mass);
  std::map<double, double> moments;
  std::vector<Well> wells;
  for (std::size_t j : negative_wells(spec)) {
    const SingularPoint& s = spec.points()[j];
    if (!moments.count(s.p)) moments[s.p] = singular_moment(*townes.profile, s.p);
    wells.push_back({j, s.x, s.p, beta_value({s.p, -s.h, astar, moments[s.p]})});
  }
  const double eta = std::min(1.0, 0.25 * spec.min_separation());
  std::vector<std::shared_ptr<const Field2D>> previous(wells.size());

  for (double a : schedule) {
    SweepRecord rec;
    rec.a = a;
    rec.eps_a = collapse_eps(astar, a, ctx.selection.p);
    std::vector<RunOutput> runs;
    for (std::size_t w = 0; w < wells.size(); ++w) {
      const Well& well = wells[w];
      const double eps = collapse_eps(astar, a, well.p);
      const double width = eps / well.beta;
      const double L = std::min(opts.grid.max_half_width, opts.grid.widths * width);
      const Grid2D grid(L, opts.grid.n, well.x);
      RunOutput run;
      run.summary.point = well.index;
      run.summary.half_width = L;
      run.summary.spacing = grid.spacing();
      if (width < opts.grid.min_cells_per_width * grid.spacing()) {
        std::ostringstream msg;
        msg << "well " << well.index << " refused: eps/beta = " << width << " below "
            << opts.grid.min_cells_per_width << " spacings; ";
        rec.note += msg.str();
        run.summary.energy = std::numeric_limits<double>::quiet_NaN();
        runs.push_back(std::move(run));
        continue;
      }
      SolveOptions so = opts.solve;
      so.residual_tol = opts.relative_residual_tol / (width * width);
      so.continuation.reset();
      if (opts.warm_start && previous[w]) {
        so.init = FieldInit{transplant(*previous[w], well.x, eps, grid)};
      } else {
        so.init = TownesInit{well.x, 1.0 / width};
      }
      MinimizationResult res = minimize(grid, spec, a, so);
      run.summary.energy = res.energy.total;
      run.summary.residual = res.residual;
      run.summary.converged = res.converged;
      run.summary.iters = res.iters;
      run.summary.boundary_warning = res.energy.boundary_warning;
      if (!res.converged) rec.note += "well " + std::to_string(well.index) + ": " + res.diagnostics + "; ";
      previous[w] = std::make_shared<const Field2D>(
          rescale_extract(res.u, well.x, eps, Grid2D(L / eps, opts.grid.n)));
      run.grid = grid;
      run.result = std::move(res);
      runs.push_back(std::move(run));
    }
    for (const auto& r : runs) rec.runs.push_back(r.summary);

    const RunOutput* best = nullptr;
    for (const auto& r : runs) {
      if (r.result && (!best || r.result->energy.total < best->result->energy.total)) best = &r;
    }
    if (!best) {
      rec.refused = true;
      rec.energy = rec.scaled_energy = std::numeric_limits<double>::quiet_NaN();
      out.records.push_back(std::move(rec));
      continue;
    }
    const MinimizationResult& res = *best->result;
    const Grid2D& grid = *best->grid;
    rec.energy = res.energy.total;
    rec.scaled_energy = rec.energy * std::pow(rec.eps_a, ctx.selection.p);
    rec.residual = res.residual;
    rec.converged = res.converged;
    rec.half_width = grid.half_width();
    rec.spacing = grid.spacing();

    const Concentration conc = locate_concentration(res.u, spec);
    rec.chosen_point = conc.index;
    rec.mass_fraction = conc.mass_fraction;
    rec.collapsed = conc.collapsed;
    if (conc.index != best->summary.point) rec.note += "concentration left its window; ";

    const Grid2D out_grid(grid.half_width() / rec.eps_a, grid.n());
    auto rescaled = std::make_shared<const Field2D>(
        rescale_extract(res.u, spec.points()[best->summary.point].x, rec.eps_a, out_grid));
    const FieldDistance dist = h1_l2_distance(*rescaled, dilated_profile(out_grid, q0, ctx.beta));
    rec.l2_err = dist.l2;
    rec.h1_err = dist.h1;
    if (opts.fit_beta) rec.fitted_beta = fit_dilation(*rescaled, q0, ctx.beta);
    out.last_rescaled = rescaled;

    rec.trial_min = std::numeric_limits<double>::infinity();
    for (const Well& well : wells) {
      const double k0 = well.beta / collapse_eps(astar, a, well.p);
      for (int k = -opts.ell_density; k <= opts.ell_density; ++k) {
        const double ell = k0 * std::exp2(static_cast<double>(k) / opts.ell_density);
        const double e = trial_energy(ell, well.x, spec, a, *townes.profile, eta);
        if (e < rec.trial_min) {
          rec.trial_min = e;
          rec.trial_ell = ell;
        }
      }
    }

    const auto v_cell = sample_potential(spec, grid, PotentialSampling::cell_average);
    const auto v_point = sample_potential(spec, grid, PotentialSampling::point);
    std::vector<double> dv(v_cell.size());
    for (std::size_t k = 0; k < dv.size(); ++k) dv[k] = (v_point[k] - v_cell[k]) * res.u.data()[k];
    rec.energy_point_sampling = rec.energy + integrate_product(grid, dv, res.u.data());
    out.records.push_back(std::move(rec));
  }
  return out;
}

PowerLawFit fit_power_law(const std::vector<double>& a, const std::vector<double>& energy,
                          double astar) {
  if (a.size() != energy.size()) throw std::invalid_argument("fit_power_law: size mismatch");
  if (a.size() < 3) throw std::invalid_argument("fit_power_law: need at least 3 records");
  std::vector<double> x(a.size()), y(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!(energy[k] < 0.0)) {
      throw std::invalid_argument("fit_power_law: nonnegative energy in the fit window");
    }
    if (!(a[k] < astar)) throw std::invalid_argument("fit_power_law: a not below a*");
    x[k] = std::log(astar - a[k]);
    y[k] = std::log(-energy[k]);
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_power_law: all a values coincide");
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  double ssr = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - (my + fit.exponent * (x[k] - mx));
    ssr += r * r;
  }
  fit.r2 = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  fit.a_min = *std::min_element(a.begin(), a.end());
  fit.a_max = *std::max_element(a.begin(), a.end());
  return fit;
}

PowerLawFit fit_power_law(const std::vector<SweepRecord>& records, double astar) {
  std::vector<double> a, e;
  for (const auto& r : records) {
    a.push_back(r.a);
    e.push_back(r.energy);
  }
  return fit_power_law(a, e, astar);
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::inconclusive: return "inconclusive";
  }
  return "unknown";
}

VerificationReport assess(SweepResult result, const VerificationTolerances& tol) {
  VerificationReport rep;
  rep.sweep = std::move(result);
  const CollapseContext& ctx = rep.sweep.context;
  const double astar = ctx.constants.astar;
  const double p = ctx.selection.p;
  const double limit_abs = std::abs(ctx.limit);
  std::vector<const SweepRecord*> done;
  for (const auto& r : rep.sweep.records) {
    if (!r.refused) done.push_back(&r);
  }
  auto ratio = [astar](const SweepRecord* r) { return r->a / astar; };
  const double top = done.empty() ? 0.0 : ratio(done.back());
  const bool asymptotic = top >= tol.asymptotic_from;
  auto add = [&](std::string name, CheckStatus st, double value, double threshold, std::string detail) {
    rep.checks.push_back({std::move(name), st, value, threshold, std::move(detail)});
  };
  auto pf = [](bool ok) { return ok ? CheckStatus::pass : CheckStatus::fail; };

  bool all_converged = true;
  for (const auto* r : done) all_converged = all_converged && r->converged;
  add("solver_converged", done.empty() ? CheckStatus::inconclusive : pf(all_converged),
      static_cast<double>(done.size()), 0.0, "every recorded minimization met its residual tolerance");

  std::vector<double> fa, fe, fp;
  for (const auto* r : done) {
    if (ratio(r) >= tol.asymptotic_from) {
      fa.push_back(r->a);
      fe.push_back(r->energy);
      fp.push_back(r->energy_point_sampling);
    }
  }
  const double expected = -p / (2.0 - p);
  if (asymptotic && fa.size() >= 3) {
    try {
      rep.fit = fit_power_law(fa, fe, astar);
      add("rate_exponent", pf(std::abs(rep.fit->exponent - expected) <= tol.exponent_rel * std::abs(expected)),
          rep.fit->exponent, expected, "fitted slope of log(-E) against log(a* - a)");
      add("energy_prefactor",
          pf(std::abs(rep.fit->prefactor - limit_abs) <= tol.prefactor_rel * limit_abs),
          rep.fit->prefactor, limit_abs, "fitted prefactor against |energy limit|");
    } catch (const std::invalid_argument& e) {
      add("rate_exponent", CheckStatus::fail, 0.0, expected, e.what());
      add("energy_prefactor", CheckStatus::fail, 0.0, limit_abs, e.what());
    }
    try {
      rep.fit_point_sampling = fit_power_law(fa, fp, astar);
    } catch (const std::invalid_argument&) {
    }
  } else {
    add("rate_exponent", CheckStatus::inconclusive, 0.0, expected, "schedule does not reach the asymptotic regime");
    add("energy_prefactor", CheckStatus::inconclusive, 0.0, limit_abs, "schedule does not reach the asymptotic regime");
  }

  if (asymptotic && done.size() >= 3) {
    bool mono = true;
    for (std::size_t k = done.size() - 2; k < done.size(); ++k) {
      mono = mono && done[k]->h1_err <= done[k - 1]->h1_err * (1.0 + tol.h1_slack);
    }
    add("profile_h1_monotone", pf(mono), done.back()->h1_err, tol.h1_slack,
        "H1 error non-increasing over the last three records");
    add("profile_h1_final", pf(done.back()->h1_err < tol.h1_final), done.back()->h1_err, tol.h1_final,
        "H1 error of the last record");
  } else {
    add("profile_h1_monotone", CheckStatus::inconclusive, 0.0, tol.h1_slack, "too few asymptotic records");
    add("profile_h1_final", CheckStatus::inconclusive, 0.0, tol.h1_final, "too few asymptotic records");
  }

  {
    const auto& cand = ctx.selection.candidates;
    std::vector<const SweepRecord*> late;
    for (const auto* r : done) {
      if (ratio(r) >= tol.selection_from) late.push_back(r);
    }
    if (late.empty()) {
      add("point_selection", CheckStatus::inconclusive, 0.0, tol.selection_mass, "no record close enough to a*");
    } else {
      bool ok = true;
      double worst = 1.0;
      for (const auto* r : late) {
        ok = ok && std::find(cand.begin(), cand.end(), r->chosen_point) != cand.end() &&
             r->mass_fraction > tol.selection_mass;
        worst = std::min(worst, r->mass_fraction);
        ok = ok && (cand.size() > 1 || r->chosen_point == late.front()->chosen_point);
      }
      add("point_selection", pf(ok), worst, tol.selection_mass,
          "chosen point is a deepest well of the dominant power with enough mass");
    }
  }

  {
    bool ok = true;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto* r : done) {
      ok = ok && r->energy <= r->trial_min;
      worst = std::max(worst, r->energy - r->trial_min);
    }
    add("variational_upper_bound", done.empty() ? CheckStatus::inconclusive : pf(ok), worst, 0.0,
        "E(a) minus the smallest trial energy, maximized over records");
  }

  {
    bool any = false, ok = true;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto* r : done) {
      if (ratio(r) < tol.sandwich_from) continue;
      any = true;
      const double s = -r->scaled_energy / limit_abs;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
      ok = ok && s >= tol.sandwich_low && s <= tol.sandwich_high;
    }
    add("energy_sandwich", any ? pf(ok) : CheckStatus::inconclusive, any ? lo : 0.0, tol.sandwich_low,
        any ? "range of -E eps^p / |limit|: [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"
            : "no record close enough to a*");
  }

  rep.pass = std::none_of(rep.checks.begin(), rep.checks.end(),
                          [](const Check& c) { return c.status == CheckStatus::fail; });
  return rep;
}

VerificationReport verify_theorem2(const PotentialSpec& spec, const std::vector<double>& schedule,
                                   const SweepOptions& opts, const VerificationTolerances& tol,
                                   const TownesSolution& townes) {
  return assess(sweep(spec, schedule, opts, townes), tol);
}

std::string report_json(const VerificationReport& report) {
  using nlohmann::json;
  const CollapseContext& ctx = report.sweep.context;
  auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["pass"] = report.pass;
  j["constants"] = {{"astar", ctx.constants.astar}, {"p", ctx.constants.p},
                    {"h0", ctx.constants.h0},       {"Ip", ctx.constants.ip},
                    {"beta", ctx.beta},             {"energy_limit", ctx.limit},
                    {"candidates", ctx.selection.candidates}};
  auto fit_json = [&](const PowerLawFit& f) {
    return json{{"exponent", f.exponent}, {"prefactor", f.prefactor}, {"r2", f.r2},
                {"window", {f.a_min, f.a_max}}};
  };
  j["fit"] = report.fit ? fit_json(*report.fit) : json(nullptr);
  j["reg_delta_sensitivity"] = nullptr;
  if (report.fit && report.fit_point_sampling) {
    j["reg_delta_sensitivity"] = {{"fit_point_sampling", fit_json(*report.fit_point_sampling)},
                                  {"prefactor_ratio",
                                   report.fit_point_sampling->prefactor / report.fit->prefactor}};
  }
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"value", num(c.value)},
                      {"threshold", num(c.threshold)}, {"detail", c.detail}});
  }
  j["checks"] = checks;
  json recs = json::array();
  for (const auto& r : report.sweep.records) {
    json runs = json::array();
    for (const auto& run : r.runs) {
      runs.push_back({{"point", run.point}, {"energy", num(run.energy)}, {"residual", run.residual},
                      {"converged", run.converged}, {"iters", run.iters},
                      {"half_width", run.half_width}, {"spacing", run.spacing},
                      {"boundary_warning", run.boundary_warning}});
    }
    recs.push_back({{"a", r.a},
                    {"a_ratio", r.a / ctx.constants.astar},
                    {"eps_a", r.eps_a},
                    {"energy", num(r.energy)},
                    {"scaled_energy", num(r.scaled_energy)},
                    {"chosen_point", r.chosen_point},
                    {"mass_fraction", r.mass_fraction},
                    {"collapsed", r.collapsed},
                    {"l2_err", r.l2_err},
                    {"h1_err", r.h1_err},
                    {"residual", r.residual},
                    {"converged", r.converged},
                    {"fitted_beta", r.fitted_beta},
                    {"trial_min", num(r.trial_min)},
                    {"trial_ell", r.trial_ell},
                    {"energy_point_sampling", num(r.energy_point_sampling)},
                    {"half_width", r.half_width},
                    {"spacing", r.spacing},
                    {"refused", r.refused},
                    {"note", r.note},
                    {"runs", runs}});
  }
  j["records"] = recs;
  return j.dump(2);
}

}  // namespace gpc
