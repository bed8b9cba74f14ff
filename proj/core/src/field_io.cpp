#include "gpc/field_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace gpc {
namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "binary field files assume little endian");

json header_for(const Field2D& f, const char* encoding) {
  const Grid2D& g = f.grid();
  return json{{"format", "gpc-field"},
              {"encoding", encoding},
              {"L", g.half_width()},
              {"n", g.n()},
              {"center", {g.center().x, g.center().y}}};
}

Grid2D grid_from_header(const json& h) {
  try {
    const auto c = h.at("center");
    return Grid2D(h.at("L").get<double>(), h.at("n").get<int>(),
                  Vec2{c.at(0).get<double>(), c.at(1).get<double>()});
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("field header: ") + e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("field file: bad number '" + std::string(s) + "' at " + where);
  }
  return v;
}

}  // namespace

FieldFormat format_for(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? FieldFormat::csv : FieldFormat::binary;
}

void save_field(const std::filesystem::path& path, const Field2D& field) {
  save_field(path, field, format_for(path));
}

void save_field(const std::filesystem::path& path, const Field2D& field, FieldFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const Grid2D& g = field.grid();
  if (format == FieldFormat::binary) {
    out << header_for(field, "f64le").dump() << '\n';
    out.write(reinterpret_cast<const char*>(field.data().data()),
              static_cast<std::streamsize>(field.data().size() * sizeof(double)));
  } else {
    out << "# " << header_for(field, "csv").dump() << "\nx,y,u\n";
    for (int i = 0; i < g.n(); ++i) {
      for (int j = 0; j < g.n(); ++j) {
        out << format_double(g.x(i)) << ',' << format_double(g.y(j)) << ','
            << format_double(field(i, j)) << '\n';
      }
    }
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Field2D load_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string first;
  std::getline(in, first);
  const bool csv = first.rfind("# ", 0) == 0;
  json header;
  try {
    header = json::parse(csv ? first.substr(2) : first);
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": bad header: " + e.what());
  }
  if (header.value("format", "") != "gpc-field") {
    throw std::runtime_error(path.string() + ": not a field file");
  }
  const Grid2D grid = grid_from_header(header);
  std::vector<double> data(grid.size());
  if (!csv) {
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(data.size() * sizeof(double))) {
      throw std::runtime_error(path.string() + ": truncated data");
    }
  } else {
    std::string line;
    std::getline(in, line);  // column names
    for (std::size_t k = 0; k < data.size(); ++k) {
      if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": truncated data");
      const auto comma = line.rfind(',');
      if (comma == std::string::npos) {
        throw std::runtime_error(path.string() + ": malformed row " + std::to_string(k + 3));
      }
      data[k] = parse_double(std::string_view(line).substr(comma + 1),
                             path.string() + ":" + std::to_string(k + 3));
    }
  }
  return Field2D(grid, std::move(data));
}

}  // namespace gpc
