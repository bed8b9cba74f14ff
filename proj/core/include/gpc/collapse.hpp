#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gpc/closedform.hpp"
#include "gpc/field.hpp"
#include "gpc/minimizer.hpp"
#include "gpc/potential.hpp"
#include "gpc/radial.hpp"

namespace gpc {

/// How each minimization window is chosen. The window for well j is centered
/// on x_j with half width min(max_half_width, widths * eps_j / beta_j), so it
/// follows the collapse scale.
struct GridPolicy {
  int n = 256;
  double max_half_width = 12.0;
  double widths = 8.0;
  /// Records with eps / beta below this many grid spacings are refused.
  double min_cells_per_width = 4.0;
};

struct SweepOptions {
  GridPolicy grid{};
  /// Base solver settings; the initialization is chosen by the sweep.
  SolveOptions solve{};
  /// Residual tolerance relative to the squared collapse wavenumber (beta / eps)^2.
  double relative_residual_tol = 1e-6;
  bool warm_start = true;
  /// Trial energies use ell = (beta / eps) 2^(k / ell_density), |k| <= ell_density.
  int ell_density = 8;
  bool fit_beta = true;
};

struct CandidateRun {
  std::size_t point = 0;
  double energy = 0.0;
  double residual = 0.0;
  bool converged = false;
  int iters = 0;
  double half_width = 0.0;
  double spacing = 0.0;
  bool boundary_warning = false;
};

struct SweepRecord {
  double a = 0.0;
  double eps_a = 0.0;
  double energy = 0.0;
  double scaled_energy = 0.0;  ///< energy * eps_a^p
  std::size_t chosen_point = 0;
  double mass_fraction = 0.0;
  bool collapsed = false;  ///< mass_fraction >= 0.5
  double l2_err = 0.0;
  double h1_err = 0.0;
  double residual = 0.0;
  bool converged = false;
  double fitted_beta = 0.0;
  double trial_min = 0.0;  ///< smallest trial energy over wells and the ell schedule
  double trial_ell = 0.0;
  /// First-order estimate of the energy had the potential been sampled
  /// pointwise with the distance floor (reg_delta sensitivity).
  double energy_point_sampling = 0.0;
  double half_width = 0.0;
  double spacing = 0.0;
  bool refused = false;
  std::vector<CandidateRun> runs;
  std::string note;
};

/// Everything derived from the Townes profile and the potential that the
/// sweep needs: selection data, a*, I_p, beta, and the energy limit.
struct CollapseContext {
  SelectionData selection;
  CollapseConstants constants;
  double beta = 0.0;
  double limit = 0.0;
  std::shared_ptr<const RadialProfile> profile;
};

/// Throws gpc::HypothesisError when the potential has no negative well.
CollapseContext collapse_context(const PotentialSpec& spec, const TownesSolution& townes);

struct SweepResult {
  CollapseContext context;
  std::vector<SweepRecord> records;
  /// Rescaled minimizer of the last record on its rescaled grid.
  std::shared_ptr<const Field2D> last_rescaled;
};

/// Schedule must be strictly increasing with every a in (0, a*). Solver
/// failures are recorded per record and the sweep continues.
SweepResult sweep(const PotentialSpec& spec, const std::vector<double>& schedule,
                  const SweepOptions& opts, const TownesSolution& townes = default_townes());

struct Concentration {
  std::size_t index = 0;
  double mass_fraction = 0.0;
  bool collapsed = false;
};

/// Negative well whose disc of radius half the minimal point separation holds
/// the most mass (the whole grid for a single point).
Concentration locate_concentration(const Field2D& u, const PotentialSpec& spec);

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;
  double a_min = 0.0;
  double a_max = 0.0;
};

/// Least squares line through (log(astar - a), log(-E)). Throws
/// std::invalid_argument with fewer than 3 records or any nonnegative energy.
PowerLawFit fit_power_law(const std::vector<SweepRecord>& records, double astar);

/// Same fit on raw (a, E) pairs.
PowerLawFit fit_power_law(const std::vector<double>& a, const std::vector<double>& energy,
                          double astar);

struct VerificationTolerances {
  double exponent_rel = 0.10;
  double prefactor_rel = 0.15;
  double h1_final = 0.15;
  double h1_slack = 0.05;
  double selection_mass = 0.9;
  double selection_from = 0.98;  ///< a / a* from which selection is checked
  double sandwich_low = 0.1;
  double sandwich_high = 10.0;
  double sandwich_from = 0.9;
  double asymptotic_from = 0.9;  ///< below this max a / a* the asymptotic checks are inconclusive
};

enum class CheckStatus { pass, fail, inconclusive };

struct Check {
  std::string name;
  CheckStatus status = CheckStatus::inconclusive;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerificationReport {
  SweepResult sweep;
  std::optional<PowerLawFit> fit;
  std::optional<PowerLawFit> fit_point_sampling;
  std::vector<Check> checks;
  bool pass = false;  ///< no check failed
};

VerificationReport verify_theorem2(const PotentialSpec& spec, const std::vector<double>& schedule,
                                   const SweepOptions& opts,
                                   const VerificationTolerances& tol = {},
                                   const TownesSolution& townes = default_townes());

/// Builds the checks for an existing sweep.
VerificationReport assess(SweepResult sweep, const VerificationTolerances& tol = {});

const char* to_string(CheckStatus s);

/// Machine-readable report with every intermediate number.
std::string report_json(const VerificationReport& report);

}  // namespace gpc
