// scnls: single runs, eps-sweep studies, scaling reports and the acceptance selftest.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scnls/acceptance.hpp"
#include "scnls/bookkeeping.hpp"
#include "scnls/config.hpp"
#include "scnls/experiments.hpp"
#include "scnls/field_io.hpp"
#include "scnls/trajectory_io.hpp"

namespace fs = std::filesystem;
using namespace scnls;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitGuard = 3;
constexpr int kExitAcceptance = 4;
constexpr const char* kOutEnv = "SCNLS_OUT_DIR";
constexpr const char* kDefaultOut = "scnls_out";

struct Options {
  std::string config_path;
  std::string out;
  int jobs = 0;
  bool verbose = false;
};

struct Context {
  std::string command;
  Config cfg;
  fs::path out;
  bool verbose = false;
};

Context make_context(const std::string& command, const Options& opt) {
  Context ctx;
  ctx.command = command;
  ctx.verbose = opt.verbose;
  if (!opt.config_path.empty()) ctx.cfg = load_config(opt.config_path);
  if (opt.jobs != 0) {
    require(opt.jobs >= 1, "--jobs must be >= 1");
    ctx.cfg.sweep.jobs = opt.jobs;
  }
  if (!opt.out.empty())
    ctx.out = opt.out;
  else if (ctx.cfg.out_dir)
    ctx.out = *ctx.cfg.out_dir;
  else if (const char* env = std::getenv(kOutEnv); env && *env)
    ctx.out = env;
  else
    ctx.out = kDefaultOut;
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  require(!ec, "cannot create output directory " + ctx.out.string() + ": " + ec.message());
  return ctx;
}

void write_summary(const Context& ctx, nlohmann::json body) {
  body["command"] = ctx.command;
  body["config"] = to_json(ctx.cfg);
  std::ofstream os(ctx.out / "summary.json");
  require(static_cast<bool>(os), "cannot write " + (ctx.out / "summary.json").string());
  os << body.dump(2) << '\n';
}

void print_checks(const StudyReport& rep, bool verbose) {
  std::size_t passed = 0;
  for (const auto& c : rep.checks) passed += c.passed ? 1 : 0;
  std::cout << rep.study << ": " << passed << "/" << rep.checks.size() << " checks passed\n";
  if (verbose)
    for (const auto& c : rep.checks)
      std::cout << "  " << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
}

int emit_study(const Context& ctx, const std::vector<std::pair<std::string, StudyReport>>& reports) {
  nlohmann::json body;
  nlohmann::json list = nlohmann::json::array();
  bool ok = true;
  for (const auto& [file, rep] : reports) {
    save_csv((ctx.out / file).string(), rep);
    auto j = summary_json(rep);
    j["csv"] = file;
    list.push_back(j);
    ok = ok && rep.all_passed();
    print_checks(rep, ctx.verbose);
  }
  body["reports"] = list;
  body["passed"] = ok;
  write_summary(ctx, body);
  return kExitOk;
}

GridPtr single_run_grid(const Config& c) {
  return make_grid(c.run.dim, c.sweep.half_width, c.run.points, c.sweep.max_points);
}

/// (dt, save_every) with dt dividing the save interval unless both are given.
std::pair<double, int> single_run_steps(const Config& c, double default_dt) {
  const RunSpec& r = c.run;
  double dt = r.dt > 0.0 ? r.dt : std::min(default_dt, c.sweep.dt_max);
  if (r.save_every > 0) return {dt, r.save_every};
  if (r.dt <= 0.0) dt = c.sweep.save_interval / std::ceil(c.sweep.save_interval / dt - 1e-9);
  return {dt, std::max(1, static_cast<int>(std::lround(c.sweep.save_interval / dt)))};
}

void dump_field(const Context& ctx, const std::string& stem, std::size_t index, const Field& f) {
  const FieldDump mode = ctx.cfg.run.dump_fields;
  if (mode == FieldDump::none) return;
  const fs::path dir = ctx.out / "fields";
  fs::create_directories(dir);
  char name[64];
  std::snprintf(name, sizeof name, "%s_%05zu.%s", stem.c_str(), index, mode == FieldDump::csv ? "csv" : "bin");
  save_field((dir / name).string(), f, mode == FieldDump::csv ? FieldEncoding::csv : FieldEncoding::binary);
}

int cmd_run_nls(const Context& ctx) {
  const Config& c = ctx.cfg;
  const double eps = c.run.eps;
  require(eps > 0.0, "config: field 'eps' must be positive for run-nls");
  auto g = single_run_grid(c);
  const Field a0 = make_a0(c.sweep, g);
  const Field u0 = a0 + eps * make_a1(c.sweep.a1_mode, c.sweep.ghost_order, a0, eps);
  const auto [dt, every] = single_run_steps(c, default_nls_dt(*g, eps));
  const NlsRunConfig rc{dt, c.sweep.T, every, c.sweep.tail_tol};

  std::ofstream csv(ctx.out / "nls_trajectory.csv");
  require(static_cast<bool>(csv), "cannot write nls_trajectory.csv");
  NlsTrajectoryWriter writer(csv, c.run.norms);
  double m0 = 0.0, e0 = 0.0, mass_drift = 0.0, energy_drift = 0.0;
  std::size_t index = 0;
  auto observe = [&](const NlsState& st) {
    writer(st);
    const double m = mass(st.u), e = semiclassical_energy(st);
    if (index == 0) {
      m0 = m;
      e0 = e;
    }
    mass_drift = std::max(mass_drift, m0 > 0.0 ? std::abs(m - m0) / m0 : 0.0);
    energy_drift = std::max(energy_drift, e0 > 0.0 ? std::abs(e - e0) / e0 : 0.0);
    dump_field(ctx, "u", index++, st.u);
  };

  nlohmann::json body;
  body["csv"] = "nls_trajectory.csv";
  body["eps"] = eps;
  try {
    const auto traj = solve_nls(u0, eps, rc, observe, false);
    body["dt"] = traj.dt;
    body["steps"] = traj.steps;
    body["status"] = "ok";
  } catch (const SolverGuardError& e) {
    body["status"] = "aborted";
    body["error"] = e.what();
    body["last_good_time"] = e.last_good_time();
  }
  body["snapshots"] = writer.rows();
  body["mass_drift"] = mass_drift;
  body["energy_drift"] = energy_drift;
  write_summary(ctx, body);
  std::cout << "run-nls: " << writer.rows() << " snapshots, mass drift " << mass_drift << ", energy drift "
            << energy_drift << '\n';
  if (body["status"] == "aborted") {
    std::cerr << "scnls: " << body["error"].get<std::string>() << '\n';
    return kExitGuard;
  }
  return kExitOk;
}

int cmd_run_wkb(const Context& ctx) {
  const Config& c = ctx.cfg;
  const double eps = c.run.eps;
  auto g = single_run_grid(c);
  const Field a0 = make_a0(c.sweep, g);
  const Field a1 = make_a1(c.sweep.a1_mode, c.sweep.ghost_order, a0, eps);
  const double dt0 = eps > 0.0 ? default_nls_dt(*g, eps) : c.sweep.dt_max;
  const auto [dt, every] = single_run_steps(c, dt0);
  GrenierRunConfig rc{dt, c.sweep.T, every, c.run.sing_tol, c.run.dealias, c.run.check_decay};

  std::ofstream csv(ctx.out / "wkb_trajectory.csv");
  require(static_cast<bool>(csv), "cannot write wkb_trajectory.csv");
  WkbTrajectoryWriter writer(csv, c.run.norms);
  std::size_t index = 0;

  nlohmann::json body;
  body["csv"] = "wkb_trajectory.csv";
  body["eps"] = eps;
  try {
    if (eps > 0.0) {
      const auto traj = solve_grenier(
          a0, a1, eps, rc,
          [&](const GrenierState& st, double gmax) {
            writer(st, gmax);
            dump_field(ctx, "a", index, st.a);
            dump_field(ctx, "phi", index++, st.phi);
          },
          false);
      body["dt"] = traj.dt;
      body["steps"] = traj.steps;
      body["sing_tol"] = traj.sing_tol;
      body["warnings"] = traj.warnings;
    } else {
      const auto traj = solve_limit_with_corrector(
          a0, a1, rc,
          [&](const LimitSnapshot& s) {
            writer(s);
            dump_field(ctx, "a", index, s.background.a);
            dump_field(ctx, "phi", index, s.background.phi);
            dump_field(ctx, "a1", index, s.corrector.a1);
            dump_field(ctx, "phi1", index++, s.corrector.phi1);
          },
          false);
      body["dt"] = traj.dt;
      body["steps"] = traj.steps;
      body["sing_tol"] = traj.sing_tol;
    }
    body["status"] = "ok";
  } catch (const SolverGuardError& e) {
    body["status"] = "aborted";
    body["error"] = e.what();
    body["last_good_time"] = e.last_good_time();
  }
  body["snapshots"] = writer.rows();
  write_summary(ctx, body);
  std::cout << "run-wkb: " << writer.rows() << " snapshots\n";
  if (body["status"] == "aborted") {
    std::cerr << "scnls: " << body["error"].get<std::string>() << '\n';
    return kExitGuard;
  }
  return kExitOk;
}

int cmd_study_wkb_error(const Context& ctx) {
  SweepConfig c = ctx.cfg.sweep;
  const auto runs = run_sweep(
      c, RunNeeds{.nls_u = true, .nls_tilde = true, .grenier_u = true, .grenier_tilde = true,
                  .limit_zero = true, .limit_tilde = true});
  return emit_study(ctx, {{"wkb_error_study.csv", wkb_error_study(c, runs)},
                          {"corrector_order_study.csv", corrector_order_study(c, runs)},
                          {"oracle_equivalence_study.csv", oracle_equivalence_study(c, runs)},
                          {"conservation_study.csv", conservation_study(runs)}});
}

int cmd_study_smalltime(const Context& ctx) {
  return emit_study(ctx, {{"small_time_study.csv", small_time_study(ctx.cfg.sweep)}});
}

int cmd_study_ghost(const Context& ctx) {
  return emit_study(ctx, {{"ghost_study.csv", ghost_separation_study(ctx.cfg.sweep)}});
}

int cmd_study_ghost_n(const Context& ctx) {
  const SweepConfig& c = ctx.cfg.sweep;
  return emit_study(ctx, {{"ghost_n_study.csv", ghost_higher_order_study(c, c.ghost_order)}});
}

SweepConfig with_s(SweepConfig c, double s) {
  if (std::find(c.s_list.begin(), c.s_list.end(), s) == c.s_list.end()) {
    c.s_list.push_back(s);
    std::sort(c.s_list.begin(), c.s_list.end());
  }
  return c;
}

int cmd_report_inflation(const Context& ctx) {
  const ScalingSpec& sp = ctx.cfg.scaling;
  const ScalingParams p{sp.n, sp.s, sp.sigma, sp.k};
  validate(p);
  const SweepConfig c = with_s(ctx.cfg.sweep, sp.k);
  const StudyReport measured = ghost_separation_study(c);
  const GaussianNorms a0{sp.n, c.a0.amplitude, c.a0.width};
  return emit_study(ctx, {{"ghost_study.csv", measured},
                          {"inflation_report.csv", inflation_bookkeeping(p, measured, c.tau, a0)}});
}

int cmd_report_corollary(const Context& ctx) {
  const ScalingSpec& sp = ctx.cfg.scaling;
  const CorollaryInputs in{sp.corollary_n, sp.C0, sp.delta, ctx.cfg.sweep.a0.width, ctx.cfg.sweep.tau};
  require(in.n >= 5, "config: field 'corollary_n' must be >= 5");
  const SweepConfig c = with_s(ctx.cfg.sweep, 1.0);
  const StudyReport measured = ghost_separation_study(c);
  return emit_study(ctx, {{"ghost_study.csv", measured},
                          {"corollary_report.csv", corollary_bookkeeping(in, measured)}});
}

int cmd_selftest(const Context& ctx) {
  nlohmann::json criteria = nlohmann::json::array();
  bool ok = true;
  auto on_result = [&](const CriterionResult& r) {
    std::cout << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.title << " -- "
              << r.detail << std::endl;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& rep : r.reports) {
      const std::string file = "criterion" + std::to_string(r.id) + "_" + rep.study + ".csv";
      save_csv((ctx.out / file).string(), rep);
      files.push_back(file);
      if (ctx.verbose) print_checks(rep, true);
    }
    criteria.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail},
                        {"csv", files}});
    ok = ok && r.passed;
  };
  const Check seeded = seeded_roundtrip_check(ctx.cfg.seed);
  std::cout << (seeded.passed ? "PASS" : "FAIL") << " " << seeded.name << ": " << seeded.detail << std::endl;
  ok = ok && seeded.passed;
  run_acceptance(ctx.cfg, on_result);

  nlohmann::json body;
  body["criteria"] = criteria;
  body["seeded_check"] = {{"passed", seeded.passed}, {"detail", seeded.detail}};
  body["passed"] = ok;
  write_summary(ctx, body);
  std::cout << (ok ? "selftest passed" : "selftest FAILED") << '\n';
  return ok ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical cubic NLS: WKB studies, ghost separation and scaling reports"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", opt.out, std::string("Output directory (default: $") + kOutEnv + " or " + kDefaultOut + ")");
  app.add_option("--jobs", opt.jobs, "Concurrent solver runs")->check(CLI::PositiveNumber);
  app.add_flag("--verbose", opt.verbose, "Print every check");

  using Handler = int (*)(const Context&);
  const std::vector<std::tuple<std::string, std::string, Handler>> commands{
      {"run-nls", "Single split-step NLS run; per-snapshot mass, energy and norms", cmd_run_nls},
      {"run-wkb", "Single phase-amplitude run (eps = 0: limit system with corrector)", cmd_run_wkb},
      {"study-wkb-error", "WKB error, corrector order, oracle and conservation over the eps-sweep",
       cmd_study_wkb_error},
      {"study-smalltime", "Small-time expansions of phi and phi1", cmd_study_smalltime},
      {"study-ghost", "Ghost separation D_s(eps) with a1 = a0", cmd_study_ghost},
      {"study-ghost-n", "Higher-order ghost with data (1 + eps^N) a0", cmd_study_ghost_n},
      {"report-inflation", "Physical-frame inflation bookkeeping from the ghost sweep", cmd_report_inflation},
      {"report-corollary", "Energy bookkeeping at s = n/4 from the ghost sweep", cmd_report_corollary},
      {"selftest", "Run every acceptance criterion on the canonical Gaussian", cmd_selftest},
  };
  for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  for (const auto& [name, help, fn] : commands) {
    if (!app.got_subcommand(name)) continue;
    try {
      return fn(make_context(name, opt));
    } catch (const ValidationError& e) {
      std::cerr << "scnls: validation error: " << e.what() << '\n';
      return kExitValidation;
    } catch (const SolverGuardError& e) {
      std::cerr << "scnls: solver guard abort (last good t = " << e.last_good_time() << "): " << e.what() << '\n';
      return kExitGuard;
    } catch (const std::exception& e) {
      std::cerr << "scnls: error: " << e.what() << '\n';
      return 1;
    }
  }
  return kExitValidation;
}
