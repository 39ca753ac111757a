#pragma once

// Tabulated study output and its CSV / JSON renderings. See docs/formats.md.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scnls/fit.hpp"

namespace scnls {

struct ReportRow {
  std::string quantity;
  double x = 0.0;  // eps or t, per StudyReport::x_label
  double s = 0.0;
  double value = 0.0;
  std::string verdict;
  double t = std::nan("");  // saved time, for time-resolved rows
};

struct FitRow {
  std::string quantity;
  double s = 0.0;
  SlopeFit fit;
  std::string verdict;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct StudyReport {
  std::string study;
  std::string x_label = "eps";
  std::vector<std::string> notes;
  std::vector<ReportRow> rows;
  std::vector<FitRow> fits;
  std::vector<Check> checks;

  void add(std::string quantity, double x, double s, double value, std::string verdict = {},
           double t = std::nan("")) {
    rows.push_back({std::move(quantity), x, s, value, std::move(verdict), t});
  }

  /// Rows of one quantity at one s, in insertion order.
  std::vector<ReportRow> select(const std::string& quantity, double s) const {
    std::vector<ReportRow> out;
    for (const auto& r : rows)
      if (r.quantity == quantity && r.s == s) out.push_back(r);
    return out;
  }

  std::optional<double> value(const std::string& quantity, double x, double s) const {
    for (const auto& r : rows)
      if (r.quantity == quantity && r.s == s && r.x == x && std::isnan(r.t)) return r.value;
    return std::nullopt;
  }

  const FitRow* fit(const std::string& quantity, double s) const {
    for (const auto& f : fits)
      if (f.quantity == quantity && f.s == s) return &f;
    return nullptr;
  }

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

inline std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// RFC 4180 quoting for fields that contain a comma, quote or newline.
inline std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char ch : v) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

/// Columns: kind,quantity,x_label,x,s,t,value,slope,slope_stderr,band95,max_residual,points,verdict
inline void write_csv(std::ostream& os, const StudyReport& rep) {
  for (const auto& n : rep.notes) os << "# " << n << '\n';
  os << "kind,quantity,x_label,x,s,t,value,slope,slope_stderr,band95,max_residual,points,verdict\n";
  for (const auto& r : rep.rows)
    os << "row," << csv_field(r.quantity) << ',' << rep.x_label << ',' << fmt17(r.x) << ',' << fmt17(r.s)
       << ',' << (std::isnan(r.t) ? std::string() : fmt17(r.t)) << ',' << fmt17(r.value)
       << ",,,,,," << csv_field(r.verdict) << '\n';
  for (const auto& f : rep.fits)
    os << "fit," << csv_field(f.quantity) << ',' << rep.x_label << ",," << fmt17(f.s) << ",,,"
       << fmt17(f.fit.slope) << ',' << fmt17(f.fit.slope_stderr) << ',' << fmt17(f.fit.band95)
       << ',' << fmt17(f.fit.max_residual) << ',' << f.fit.points << ',' << csv_field(f.verdict) << '\n';
}

inline nlohmann::json summary_json(const StudyReport& rep) {
  nlohmann::json j;
  j["study"] = rep.study;
  j["notes"] = rep.notes;
  j["passed"] = rep.all_passed();
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = checks;
  nlohmann::json fits = nlohmann::json::array();
  for (const auto& f : rep.fits)
    fits.push_back({{"quantity", f.quantity},
                    {"s", f.s},
                    {"slope", f.fit.slope},
                    {"band95", f.fit.band95},
                    {"verdict", f.verdict}});
  j["fits"] = fits;
  return j;
}

inline void save_csv(const std::string& path, const StudyReport& rep) {
  std::ofstream os(path);
  require(static_cast<bool>(os), "cannot open " + path + " for writing");
  write_csv(os, rep);
}

}  // namespace scnls
