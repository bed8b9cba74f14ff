#pragma once

#include <filesystem>

#include "gpc/grid.hpp"

namespace gpc {

enum class FieldFormat {
  /// One JSON header line, then n * n little-endian float64 values.
  binary,
  /// "# {json header}" line, a column line "x,y,u", then one row per node.
  csv,
};

/// Format implied by the file extension (".csv" selects csv).
FieldFormat format_for(const std::filesystem::path& path);

/// Values are written with full round-trip precision in both formats.
void save_field(const std::filesystem::path& path, const Field2D& field, FieldFormat format);
void save_field(const std::filesystem::path& path, const Field2D& field);

/// Detects the format from the first byte. Throws std::runtime_error on I/O
/// or format errors.
Field2D load_field(const std::filesystem::path& path);

}  // namespace gpc
