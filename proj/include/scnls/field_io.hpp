#pragma once

// Field dumps. Both formats start with a single JSON header line
//   {"format":"scnls-field","version":1,"dim":n,"half_width":L,"points_per_axis":N,
//    "space":"physical"|"spectral","encoding":"csv"|"binary"}
// followed by either CSV rows `index,re,im` or N^n little-endian (re, im) double pairs.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "scnls/grid.hpp"

namespace scnls {

enum class FieldEncoding { csv, binary };

inline nlohmann::json field_header(const Field& f, FieldEncoding enc) {
  return {{"format", "scnls-field"},
          {"version", 1},
          {"dim", f.grid->dim()},
          {"half_width", f.grid->half_width()},
          {"points_per_axis", f.grid->points_per_axis()},
          {"space", f.space == Space::physical ? "physical" : "spectral"},
          {"encoding", enc == FieldEncoding::csv ? "csv" : "binary"}};
}

inline void write_field(std::ostream& os, const Field& f, FieldEncoding enc) {
  os << field_header(f, enc).dump() << '\n';
  if (enc == FieldEncoding::csv) {
    os << "index,re,im\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < f.size(); ++i)
      os << i << ',' << f[i].real() << ',' << f[i].imag() << '\n';
  } else {
    static_assert(sizeof(cplx) == 2 * sizeof(double));
    os.write(reinterpret_cast<const char*>(f.values.data()),
             static_cast<std::streamsize>(f.size() * sizeof(cplx)));
  }
}

inline Field read_field(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), "read_field: missing header");
  const auto hdr = nlohmann::json::parse(line, nullptr, false);
  require(!hdr.is_discarded() && hdr.value("format", "") == "scnls-field",
          "read_field: not an scnls field dump");
  auto grid = make_grid(hdr.at("dim").get<int>(), hdr.at("half_width").get<double>(),
                        hdr.at("points_per_axis").get<int>());
  const Space sp = hdr.at("space").get<std::string>() == "spectral" ? Space::spectral
                                                                     : Space::physical;
  Field f(grid, sp);
  if (hdr.at("encoding").get<std::string>() == "csv") {
    require(static_cast<bool>(std::getline(is, line)) && line == "index,re,im",
            "read_field: missing CSV column header");
    for (std::size_t i = 0; i < f.size(); ++i) {
      require(static_cast<bool>(std::getline(is, line)), "read_field: truncated CSV body");
      std::istringstream row(line);
      std::string idx, re, im;
      std::getline(row, idx, ',');
      std::getline(row, re, ',');
      std::getline(row, im, ',');
      require(std::stoull(idx) == i, "read_field: CSV rows out of order");
      f[i] = cplx(std::stod(re), std::stod(im));
    }
  } else {
    is.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.size() * sizeof(cplx)));
    require(static_cast<std::size_t>(is.gcount()) == f.size() * sizeof(cplx),
            "read_field: truncated binary body");
  }
  return f;
}

inline void save_field(const std::string& path, const Field& f, FieldEncoding enc) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), "save_field: cannot open " + path);
  write_field(os, f, enc);
}

inline Field load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), "load_field: cannot open " + path);
  return read_field(is);
}

}  // namespace scnls
