#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gpc/radial.hpp"

namespace gpc::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kNumeric = 2,
  kHypothesis = 3,
};

/// Entry point of the `gpc` tool. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Profile interchange: header "r,Q,Qprime", then one row per mesh node.
void write_profile_csv(const std::filesystem::path& path, const RadialProfile& profile);
RadialProfile read_profile_csv(const std::filesystem::path& path);

}  // namespace gpc::cli
