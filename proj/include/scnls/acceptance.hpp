#pragma once

// The nine acceptance criteria on the canonical Gaussian, shared by the
// acceptance test binary and `scnls selftest`, plus a seeded round-trip check.

#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "scnls/bookkeeping.hpp"
#include "scnls/config.hpp"
#include "scnls/experiments.hpp"
#include "scnls/field_io.hpp"
#include "scnls/report.hpp"

namespace scnls {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  std::vector<StudyReport> reports;
};

namespace detail {

inline CriterionResult summarize(int id, std::string title, std::vector<StudyReport> reports) {
  CriterionResult res{id, std::move(title), true, {}, std::move(reports)};
  std::ostringstream failed;
  std::size_t checks = 0;
  for (const auto& rep : res.reports)
    for (const auto& c : rep.checks) {
      ++checks;
      if (!c.passed) {
        res.passed = false;
        failed << (failed.tellp() > 0 ? "; " : "") << c.name << ": " << c.detail;
      }
    }
  if (checks == 0) {
    res.passed = false;
    res.detail = "no checks evaluated";
  } else if (res.passed) {
    std::ostringstream ok;
    ok << checks << " checks passed";
    res.detail = ok.str();
  } else {
    res.detail = failed.str();
  }
  return res;
}

inline StudyReport only_checks_matching(StudyReport rep, const std::string& prefix) {
  std::vector<Check> kept;
  for (auto& c : rep.checks)
    if (c.name.rfind(prefix, 0) == 0) kept.push_back(std::move(c));
  rep.checks = std::move(kept);
  return rep;
}

/// The same run expressed on an identical grid instance.
inline NlsRun rebind(NlsRun run, const GridPtr& grid) {
  for (auto& u : run.u) {
    require(u.grid->dim() == grid->dim() && u.grid->half_width() == grid->half_width() &&
                u.grid->points_per_axis() == grid->points_per_axis(),
            "rebind: grid geometry differs");
    u.grid = grid;
  }
  return run;
}

}  // namespace detail

using CriterionCallback = std::function<void(const CriterionResult&)>;

/// Runs all criteria with the sweep, two-grid and tolerance settings of `cfg`
/// (a1 mode forced to a1 = a0 where the criterion requires it). Solver guard
/// trips propagate as SolverGuardError.
inline std::vector<CriterionResult> run_acceptance(const Config& cfg, const CriterionCallback& on_result = {}) {
  std::vector<CriterionResult> out;
  auto emit = [&](CriterionResult r) {
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  };

  SweepConfig c = cfg.sweep;
  c.a1_mode = A1Mode::equal_a0;
  c.ghost_order = 1;
  validate(c);
  const RunNeeds all{true, true, true, true, true, true, true};
  const auto runs = run_sweep(c, all);

  emit(detail::summarize(1, "oracle equivalence (NLS vs reconstructed phase-amplitude, rel L2 <= 1e-4)",
                         {oracle_equivalence_study(c, runs)}));
  emit(detail::summarize(2, "WKB error order (slope in [0.8, 1.2])", {wkb_error_study(c, runs)}));
  emit(detail::summarize(3, "corrector expansion order (slope in [1.7, 2.3])",
                         {detail::only_checks_matching(corrector_order_study(c, runs), "expansion")}));
  emit(detail::summarize(4, "small-time phase expansions (t-slope in [2.7, 3.3])", {small_time_study(c)}));
  const StudyReport ghost = ghost_study(c, runs);
  emit(detail::summarize(5, "ghost separation (two finest D_s within 25%, above floor; control = 0)", {ghost}));

  SweepConfig deg = c;
  deg.a1_mode = A1Mode::imaginary;
  emit(detail::summarize(6, "corrector phase degeneracy for a1 = i a0 (sup ||phi1||_inf <= 1e-8)",
                         {corrector_degeneracy_study(deg)}));

  SweepConfig ho = c;
  ho.a1_mode = A1Mode::scaled;
  ho.ghost_order = 2;
  auto ho_runs = run_sweep(ho, RunNeeds{.nls_tilde = true, .limit_tilde = true});
  for (std::size_t k = 0; k < ho_runs.size(); ++k) {
    ho_runs[k].nls_u = detail::rebind(*runs[k].nls_u, ho_runs[k].grid);
    ho_runs[k].nls_control = detail::rebind(*runs[k].nls_control, ho_runs[k].grid);
  }
  const StudyReport higher = ghost_study(ho, ho_runs, nullptr, 0.30);

  StudyReport cons = conservation_study(runs);
  StudyReport cons_ho = conservation_study(ho_runs);
  for (auto& ch : cons_ho.checks) ch.name += " (higher-order runs)";
  emit(detail::summarize(7, "conservation (mass drift < 1e-10, energy drift < 1e-6)", {cons, cons_ho}));

  const TwoGridSpec& tg = cfg.two_grid;
  emit(detail::summarize(
      8, "scaling identities (two-grid Hdot^m to 1e-8; exponent sign flips at k = s/(1+s_c-s))",
      {two_grid_scaling_study(tg.dim, tg.s, tg.j_list, tg.m_list, tg.half_width, tg.points, tg.tau, tg.steps),
       threshold_lattice_study(3, 8)}));
  emit(detail::summarize(9, "higher-order ghost, N = 2 (two finest values within 30%)", {higher}));
  return out;
}

/// Random fields on random small grids, seeded: forward/backward transform
/// round trip (1e-12), Parseval (1e-12) and exact CSV/binary dump round trips.
inline Check seeded_roundtrip_check(std::uint64_t seed, int trials = 8) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim_dist(1, 3);
  std::uniform_real_distribution<double> val(-1.0, 1.0), width(0.5, 20.0);
  double worst_rt = 0.0, worst_parseval = 0.0;
  bool io_exact = true;
  for (int t = 0; t < trials; ++t) {
    const int dim = dim_dist(rng);
    const int n = dim == 3 ? 8 : (dim == 2 ? 16 : 64);
    auto g = make_grid(dim, width(rng), n);
    Field f(g);
    for (auto& v : f.values) v = cplx(val(rng), val(rng));
    const Field back = inverse_transform(transform(f));
    const double scale = l2_quadrature(f);
    worst_rt = std::max(worst_rt, l2_quadrature(back - f) / scale);
    worst_parseval = std::max(worst_parseval, std::abs(norm(f) - scale) / scale);
    for (FieldEncoding enc : {FieldEncoding::csv, FieldEncoding::binary}) {
      std::stringstream ss;
      write_field(ss, f, enc);
      const Field r = read_field(ss);
      io_exact = io_exact && r.values == f.values;
    }
  }
  std::ostringstream det;
  det << "seed " << seed << ", " << trials << " fields: round trip " << worst_rt << ", Parseval "
      << worst_parseval << ", dumps " << (io_exact ? "exact" : "inexact");
  return {"seeded round trip", worst_rt <= 1e-12 && worst_parseval <= 1e-12 && io_exact, det.str()};
}

}  // namespace scnls
