#pragma once

// Flat JSON run configuration. Every key is optional except schema_version;
// unknown keys are rejected and every error names the offending field.

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "scnls/bookkeeping.hpp"
#include "scnls/errors.hpp"
#include "scnls/experiments.hpp"

namespace scnls {

inline constexpr int kConfigSchemaVersion = 1;

enum class FieldDump { none, csv, binary };

/// Single runs (run-nls, run-wkb).
struct RunSpec {
  int dim = 1;
  int points = 512;
  double eps = 0.0625;
  double dt = 0.0;  // 0: solver default
  int save_every = 0;  // 0: one save per sweep save_interval
  std::vector<double> norms{0.0, 1.0};
  std::optional<double> sing_tol;
  bool dealias = true;
  bool check_decay = true;
  FieldDump dump_fields = FieldDump::none;
};

/// Inflation / corollary bookkeeping.
struct ScalingSpec {
  int n = 6;
  double s = 1.0;
  double sigma = 0.5;
  double k = 1.0;
  int corollary_n = 6;
  double C0 = 1.0;
  double delta = 0.1;
};

/// Two-grid scaling oracle.
struct TwoGridSpec {
  int dim = 3;
  double s = 0.0;
  std::vector<int> j_list{2, 4};
  std::vector<double> m_list{0.0, 1.0, 2.0};
  double half_width = 6.0;
  int points = 32;
  double tau = 0.1;
  int steps = 20;
};

struct Config {
  int schema_version = kConfigSchemaVersion;
  SweepConfig sweep;
  RunSpec run;
  ScalingSpec scaling;
  TwoGridSpec two_grid;
  std::uint64_t seed = 12345;
  std::optional<std::string> out_dir;
};

namespace detail {

class ConfigReader {
 public:
  explicit ConfigReader(const nlohmann::json& j) : j_(j) {
    if (!j_.is_object()) throw ValidationError("config: top level must be a JSON object");
  }

  template <class T>
  void get(const char* key, T& dst) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    dst = convert<T>(*it, key);
  }

  template <class T>
  void get(const char* key, std::optional<T>& dst) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    dst = convert<T>(*it, key);
  }

  void reject_unknown() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) throw ValidationError("config: unknown key '" + item.key() + "'");
  }

 private:
  template <class T>
  static T convert(const nlohmann::json& v, const char* key) {
    const std::string field(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ValidationError("config: field '" + field + "' must be a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ValidationError("config: field '" + field + "' must be a string");
      return v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ValidationError("config: field '" + field + "' must be an integer");
      if constexpr (std::is_unsigned_v<T>)
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)
          throw ValidationError("config: field '" + field + "' must be non-negative");
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ValidationError("config: field '" + field + "' must be a number");
      const double d = v.get<double>();
      if (!std::isfinite(d)) throw ValidationError("config: field '" + field + "' must be finite");
      return d;
    } else {
      if (!v.is_array()) throw ValidationError("config: field '" + field + "' must be an array");
      T out;
      for (const auto& e : v) out.push_back(convert<typename T::value_type>(e, key));
      return out;
    }
  }

  const nlohmann::json& j_;
  std::set<std::string> seen_;
};

inline void field_check(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ValidationError(std::string("config: field '") + field + "' " + what);
}

inline A1Mode parse_a1_mode(const std::string& v) {
  for (A1Mode m : {A1Mode::zero, A1Mode::equal_a0, A1Mode::scaled, A1Mode::imaginary})
    if (v == to_string(m)) return m;
  throw ValidationError("config: field 'a1_mode' must be one of zero, equal_a0, scaled, imaginary");
}

inline FieldDump parse_dump(const std::string& v) {
  if (v == "none") return FieldDump::none;
  if (v == "csv") return FieldDump::csv;
  if (v == "binary") return FieldDump::binary;
  throw ValidationError("config: field 'dump_fields' must be one of none, csv, binary");
}

inline const char* to_string(FieldDump d) {
  switch (d) {
    case FieldDump::none: return "none";
    case FieldDump::csv: return "csv";
    case FieldDump::binary: return "binary";
  }
  return "?";
}

}  // namespace detail

/// Parses and validates a configuration document. Throws ValidationError.
inline Config parse_config(const nlohmann::json& j) {
  using detail::field_check;
  detail::ConfigReader rd(j);
  Config c;
  SweepConfig& w = c.sweep;
  RunSpec& r = c.run;
  ScalingSpec& sc = c.scaling;
  TwoGridSpec& tg = c.two_grid;

  std::optional<int> version;
  rd.get("schema_version", version);
  field_check(version.has_value(), "schema_version", "is required");
  field_check(*version == kConfigSchemaVersion, "schema_version",
              "must be " + std::to_string(kConfigSchemaVersion));

  rd.get("eps_list", w.eps_list);
  rd.get("s_list", w.s_list);
  rd.get("tau", w.tau);
  rd.get("T", w.T);
  rd.get("save_interval", w.save_interval);
  rd.get("a0_amplitude", w.a0.amplitude);
  rd.get("a0_width", w.a0.width);
  std::string a1 = to_string(w.a1_mode);
  rd.get("a1_mode", a1);
  w.a1_mode = detail::parse_a1_mode(a1);
  rd.get("ghost_order", w.ghost_order);
  rd.get("half_width", w.half_width);
  rd.get("base_points", w.base_points);
  rd.get("grow_grid", w.grow_grid);
  rd.get("max_points", w.max_points);
  rd.get("dt_max", w.dt_max);
  rd.get("tail_tol", w.tail_tol);
  rd.get("floor_factor", w.floor_factor);
  rd.get("refinement_check", w.refinement_check);
  rd.get("small_time_levels", w.small_time_levels);
  rd.get("jobs", w.jobs);

  rd.get("dim", r.dim);
  rd.get("points", r.points);
  rd.get("eps", r.eps);
  rd.get("dt", r.dt);
  rd.get("save_every", r.save_every);
  rd.get("norms", r.norms);
  rd.get("sing_tol", r.sing_tol);
  rd.get("dealias", r.dealias);
  rd.get("check_decay", r.check_decay);
  std::string dump = detail::to_string(r.dump_fields);
  rd.get("dump_fields", dump);
  r.dump_fields = detail::parse_dump(dump);

  rd.get("n", sc.n);
  rd.get("s", sc.s);
  rd.get("sigma", sc.sigma);
  rd.get("k", sc.k);
  rd.get("corollary_n", sc.corollary_n);
  rd.get("C0", sc.C0);
  rd.get("delta", sc.delta);

  rd.get("two_grid_dim", tg.dim);
  rd.get("two_grid_s", tg.s);
  rd.get("two_grid_j_list", tg.j_list);
  rd.get("two_grid_m_list", tg.m_list);
  rd.get("two_grid_half_width", tg.half_width);
  rd.get("two_grid_points", tg.points);
  rd.get("two_grid_tau", tg.tau);
  rd.get("two_grid_steps", tg.steps);

  rd.get("seed", c.seed);
  rd.get("out_dir", c.out_dir);
  rd.reject_unknown();

  field_check(!w.eps_list.empty(), "eps_list", "must not be empty");
  for (std::size_t i = 0; i < w.eps_list.size(); ++i) {
    field_check(w.eps_list[i] > 0.0 && w.eps_list[i] <= 1.0, "eps_list", "entries must lie in (0, 1]");
    if (i > 0) field_check(w.eps_list[i] < w.eps_list[i - 1], "eps_list", "must be strictly decreasing");
  }
  for (double s : w.s_list) field_check(s >= 0.0, "s_list", "entries must be >= 0");
  field_check(w.T > 0.0, "T", "must be positive");
  field_check(w.save_interval > 0.0 && w.save_interval <= w.T, "save_interval", "must lie in (0, T]");
  field_check(multiple_of(w.T, w.save_interval), "T", "must be a multiple of save_interval");
  field_check(w.tau > 0.0 && w.tau <= w.T, "tau", "must lie in (0, T]");
  field_check(multiple_of(w.tau, w.save_interval), "tau", "must be a multiple of save_interval");
  field_check(w.a0.width > 0.0, "a0_width", "must be positive");
  field_check(w.ghost_order >= 1, "ghost_order", "must be >= 1");
  field_check(w.half_width > 0.0, "half_width", "must be positive");
  field_check(w.base_points >= 8 && std::has_single_bit(static_cast<unsigned>(w.base_points)),
              "base_points", "must be a power of two >= 8");
  field_check(w.max_points >= 8, "max_points", "must be >= 8");
  field_check(w.dt_max > 0.0, "dt_max", "must be positive");
  field_check(w.tail_tol > 0.0, "tail_tol", "must be positive");
  field_check(w.floor_factor >= 0.0, "floor_factor", "must be >= 0");
  field_check(w.small_time_levels >= 2, "small_time_levels", "must be >= 2");
  field_check(w.jobs >= 1, "jobs", "must be >= 1");

  field_check(r.dim >= 1 && r.dim <= kMaxDim, "dim", "must be 1, 2 or 3");
  field_check(r.points >= 8 && std::has_single_bit(static_cast<unsigned>(r.points)), "points",
              "must be a power of two >= 8");
  field_check(r.eps >= 0.0 && r.eps <= 1.0, "eps", "must lie in [0, 1]");
  field_check(r.dt >= 0.0, "dt", "must be >= 0 (0 selects the default step)");
  field_check(r.dt <= w.T, "dt", "must not exceed T");
  field_check(r.save_every >= 0, "save_every", "must be >= 0");
  for (double s : r.norms) field_check(s >= 0.0, "norms", "entries must be >= 0");
  if (r.sing_tol) field_check(*r.sing_tol > 0.0, "sing_tol", "must be positive");

  field_check(sc.n >= 3, "n", "must be >= 3");
  field_check(sc.s >= 0.0 && sc.s < sc.n / 2.0 - 1.0, "s", "must lie in [0, n/2 - 1)");
  field_check(sc.sigma < sc.n / 2.0 - 1.0, "sigma", "must be < n/2 - 1");
  field_check(sc.k > 0.0, "k", "must be positive");
  field_check(sc.corollary_n >= 5, "corollary_n", "must be >= 5");
  field_check(sc.C0 > 0.0, "C0", "must be positive");
  field_check(sc.delta > 0.0, "delta", "must be positive");

  field_check(tg.dim >= 1 && tg.dim <= kMaxDim, "two_grid_dim", "must be 1, 2 or 3");
  field_check(tg.s >= 0.0 && tg.s < tg.dim / 2.0 - 1.0, "two_grid_s", "must lie in [0, dim/2 - 1)");
  field_check(!tg.j_list.empty(), "two_grid_j_list", "must not be empty");
  for (int jv : tg.j_list) field_check(jv >= 1, "two_grid_j_list", "entries must be >= 1");
  for (double m : tg.m_list) field_check(m >= 0.0, "two_grid_m_list", "entries must be >= 0");
  field_check(tg.half_width > 0.0, "two_grid_half_width", "must be positive");
  field_check(tg.points >= 8 && std::has_single_bit(static_cast<unsigned>(tg.points)), "two_grid_points",
              "must be a power of two >= 8");
  field_check(tg.tau > 0.0, "two_grid_tau", "must be positive");
  field_check(tg.steps >= 1, "two_grid_steps", "must be >= 1");
  if (c.out_dir) field_check(!c.out_dir->empty(), "out_dir", "must not be empty");
  return c;
}

inline Config load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("config: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config: " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

/// The effective configuration, in the same flat schema.
inline nlohmann::json to_json(const Config& c) {
  const SweepConfig& w = c.sweep;
  const RunSpec& r = c.run;
  const ScalingSpec& sc = c.scaling;
  const TwoGridSpec& tg = c.two_grid;
  nlohmann::json j;
  j["schema_version"] = c.schema_version;
  j["eps_list"] = w.eps_list;
  j["s_list"] = w.s_list;
  j["tau"] = w.tau;
  j["T"] = w.T;
  j["save_interval"] = w.save_interval;
  j["a0_amplitude"] = w.a0.amplitude;
  j["a0_width"] = w.a0.width;
  j["a1_mode"] = to_string(w.a1_mode);
  j["ghost_order"] = w.ghost_order;
  j["half_width"] = w.half_width;
  j["base_points"] = w.base_points;
  j["grow_grid"] = w.grow_grid;
  j["max_points"] = w.max_points;
  j["dt_max"] = w.dt_max;
  j["tail_tol"] = w.tail_tol;
  j["floor_factor"] = w.floor_factor;
  j["refinement_check"] = w.refinement_check;
  j["small_time_levels"] = w.small_time_levels;
  j["jobs"] = w.jobs;
  j["dim"] = r.dim;
  j["points"] = r.points;
  j["eps"] = r.eps;
  j["dt"] = r.dt;
  j["save_every"] = r.save_every;
  j["norms"] = r.norms;
  j["sing_tol"] = r.sing_tol ? nlohmann::json(*r.sing_tol) : nlohmann::json(nullptr);
  j["dealias"] = r.dealias;
  j["check_decay"] = r.check_decay;
  j["dump_fields"] = detail::to_string(r.dump_fields);
  j["n"] = sc.n;
  j["s"] = sc.s;
  j["sigma"] = sc.sigma;
  j["k"] = sc.k;
  j["corollary_n"] = sc.corollary_n;
  j["C0"] = sc.C0;
  j["delta"] = sc.delta;
  j["two_grid_dim"] = tg.dim;
  j["two_grid_s"] = tg.s;
  j["two_grid_j_list"] = tg.j_list;
  j["two_grid_m_list"] = tg.m_list;
  j["two_grid_half_width"] = tg.half_width;
  j["two_grid_points"] = tg.points;
  j["two_grid_tau"] = tg.tau;
  j["two_grid_steps"] = tg.steps;
  j["seed"] = c.seed;
  if (c.out_dir) j["out_dir"] = *c.out_dir;
  return j;
}

}  // namespace scnls
