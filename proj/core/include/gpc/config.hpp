#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gpc/collapse.hpp"
#include "gpc/minimizer.hpp"
#include "gpc/potential.hpp"

namespace gpc {

/// A schedule given as ratios a / a* or as absolute a values.
struct Schedule {
  enum class Kind { ratios, values };
  Kind kind = Kind::ratios;
  std::vector<double> entries;

  /// Absolute a values for a given a*.
  std::vector<double> resolve(double astar) const;
};

/// The default approach a / a* in {0.90, 0.95, 0.98, 0.99, 0.995}.
Schedule default_schedule();

/// Parses "default", a comma separated list of ratios, "values:a1,a2,...",
/// or "geometric:g0:g1:count" (count gaps 1 - a/a* spaced geometrically
/// from g0 down to g1). Throws gpc::ConfigError.
Schedule parse_schedule(const std::string& text);

struct GridConfig {
  double half_width = 12.0;
  int n = 256;
};

/// Parsed configuration file (JSON). Every block is optional; the potential
/// block may also be given at the top level ({g, points, reg_delta}).
struct RunConfig {
  std::optional<PotentialSpec> potential;
  GridConfig grid{};
  SolveOptions solver{};
  SweepOptions sweep{};
  std::optional<Schedule> schedule;
  std::string output;
  bool plot = true;
};

/// Throws gpc::ConfigError naming the line (syntax) or the field (schema).
/// Relative file references are resolved against base_dir.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

}  // namespace gpc
