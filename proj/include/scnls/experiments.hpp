#pragma once

// eps-sweeps and t-sweeps over the NLS and phase-amplitude solvers: WKB error
// orders, corrector order, small-time phase expansions, ghost-effect
// separation, and the two-grid scaling check.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scnls/grid.hpp"
#include "scnls/nls.hpp"
#include "scnls/parallel.hpp"
#include "scnls/report.hpp"
#include "scnls/wkb.hpp"

namespace scnls {

enum class A1Mode { zero, equal_a0, scaled, imaginary };

inline const char* to_string(A1Mode m) {
  switch (m) {
    case A1Mode::zero: return "zero";
    case A1Mode::equal_a0: return "equal_a0";
    case A1Mode::scaled: return "scaled";
    case A1Mode::imaginary: return "imaginary";
  }
  return "?";
}

struct GaussianSpec {
  double amplitude = 1.0;
  double width = 1.0;
};

struct SweepConfig {
  std::vector<double> eps_list{0.25, 0.125, 0.0625, 0.03125, 0.015625};
  std::vector<double> s_list{0.0, 1.0, 2.0};
  double tau = 0.2;
  double T = 0.25;
  double save_interval = 0.05;
  GaussianSpec a0;
  A1Mode a1_mode = A1Mode::equal_a0;
  int ghost_order = 1;  // N in (1 + eps^N) a0 when a1_mode == scaled
  double half_width = 8.0;
  int base_points = 128;  // N at eps_list.front()
  bool grow_grid = true;  // N(eps) = base_points eps0 / eps, rounded up to a power of two
  std::size_t max_points = kDefaultMaxPoints;
  double dt_max = 1e-3;
  double tail_tol = 1e-6;
  double floor_factor = 1e-3;  // separation floor = floor_factor ||a0||_L2
  bool refinement_check = false;
  int small_time_levels = 6;  // t = T 2^{-m}, m = 0..levels
  int jobs = 1;
};

inline bool multiple_of(double x, double h) {
  const double q = x / h;
  return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, q);
}

inline void validate(const SweepConfig& c) {
  require(c.eps_list.size() >= 1, "sweep: eps_list must not be empty");
  for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
    require(c.eps_list[i] > 0.0 && c.eps_list[i] <= 1.0, "sweep: eps_list entries must lie in (0, 1]");
    if (i > 0) require(c.eps_list[i] < c.eps_list[i - 1], "sweep: eps_list must be strictly decreasing");
  }
  for (double s : c.s_list) require(std::isfinite(s) && s >= 0.0, "sweep: s_list entries must be >= 0");
  require(c.T > 0.0 && c.save_interval > 0.0 && c.save_interval <= c.T,
          "sweep: need 0 < save_interval <= T");
  require(multiple_of(c.T, c.save_interval), "sweep: T must be a multiple of save_interval");
  require(c.tau > 0.0 && c.tau <= c.T, "sweep: tau must lie in (0, T]");
  require(multiple_of(c.tau, c.save_interval), "sweep: tau must be a multiple of save_interval");
  require(c.a0.width > 0.0, "sweep: a0 width must be positive");
  require(c.ghost_order >= 1, "sweep: ghost_order must be >= 1");
  require(c.dt_max > 0.0, "sweep: dt_max must be positive");
  require(c.tail_tol > 0.0, "sweep: tail_tol must be positive");
  require(c.small_time_levels >= 2, "sweep: small_time_levels must be >= 2");
  require(c.jobs >= 1, "sweep: jobs must be >= 1");
}

inline int grid_points_for(const SweepConfig& c, double eps) {
  if (!c.grow_grid) return c.base_points;
  const double want = c.base_points * c.eps_list.front() / eps;
  return static_cast<int>(std::bit_ceil(static_cast<unsigned>(std::ceil(want - 1e-9))));
}

/// Uniform step not above the NLS default rule (clipped by dt_max) and
/// dividing save_interval exactly.
inline double dt_for(const SweepConfig& c, const Grid& g, double eps) {
  const double dt0 = std::min(default_nls_dt(g, eps), c.dt_max);
  return c.save_interval / std::ceil(c.save_interval / dt0 - 1e-9);
}

inline Field make_a0(const SweepConfig& c, const GridPtr& g) {
  return make_gaussian(g, c.a0.amplitude, c.a0.width);
}

/// The a1 datum: u~(0) = a0 + eps a1.
inline Field make_a1(A1Mode mode, int ghost_order, const Field& a0, double eps) {
  switch (mode) {
    case A1Mode::zero: return Field(a0.grid);
    case A1Mode::equal_a0: return a0;
    case A1Mode::scaled: return std::pow(eps, ghost_order - 1) * a0;
    case A1Mode::imaginary: return cplx(0.0, 1.0) * a0;
  }
  return Field(a0.grid);
}

struct NlsRun {
  std::vector<double> times;
  std::vector<Field> u;
  double mass_drift = 0.0;    // max relative |M(t) - M(0)|
  double energy_drift = 0.0;  // max relative |E(t) - E(0)|
};

struct RunNeeds {
  bool nls_u = false;        // a1 = 0
  bool nls_tilde = false;    // a1 per mode
  bool nls_control = false;  // second independent a1 = 0 run
  bool grenier_u = false;
  bool grenier_tilde = false;
  bool limit_zero = false;   // eps = 0 with corrector, a1 = 0
  bool limit_tilde = false;  // eps = 0 with corrector, a1 per mode
};

struct EpsilonRun {
  double eps = 0.0;
  GridPtr grid;
  double dt = 0.0;
  Field a0, a1;
  std::optional<NlsRun> nls_u, nls_tilde, nls_control;
  std::optional<GrenierTrajectory> grenier_u, grenier_tilde;
  std::optional<LimitTrajectory> limit_zero, limit_tilde;
};

inline NlsRun run_nls_tracked(const Field& u0, double eps, double dt, const SweepConfig& c) {
  NlsRun out;
  const int save_every = static_cast<int>(std::lround(c.save_interval / dt));
  std::optional<double> m0, e0;
  solve_nls(
      u0, eps, NlsRunConfig{dt, c.T, save_every, c.tail_tol},
      [&](const NlsState& s) {
        const double m = mass(s.u);
        const double e = semiclassical_energy(s);
        if (!m0) {
          m0 = m;
          e0 = e;
        }
        if (*m0 > 0.0) out.mass_drift = std::max(out.mass_drift, std::abs(m - *m0) / *m0);
        if (*e0 > 0.0) out.energy_drift = std::max(out.energy_drift, std::abs(e - *e0) / *e0);
        out.times.push_back(s.t);
        out.u.push_back(s.u);
      },
      false);
  return out;
}

/// Runs every requested solver for every eps, concurrently across (eps, run).
/// `refine` multiplies the grid size (grid-independence certificates).
inline std::vector<EpsilonRun> run_sweep(const SweepConfig& c, const RunNeeds& needs, int refine = 1) {
  validate(c);
  std::vector<EpsilonRun> runs(c.eps_list.size());
  for (std::size_t k = 0; k < runs.size(); ++k) {
    auto& r = runs[k];
    r.eps = c.eps_list[k];
    r.grid = make_grid(1, c.half_width, grid_points_for(c, r.eps) * refine, c.max_points);
    r.dt = dt_for(c, *r.grid, r.eps);
    r.a0 = make_a0(c, r.grid);
    r.a1 = make_a1(c.a1_mode, c.ghost_order, r.a0, r.eps);
  }
  enum Kind { kNlsU, kNlsTilde, kNlsControl, kGrenierU, kGrenierTilde, kLimitZero, kLimitTilde };
  const bool want[] = {needs.nls_u,         needs.nls_tilde,  needs.nls_control, needs.grenier_u,
                       needs.grenier_tilde, needs.limit_zero, needs.limit_tilde};
  std::vector<std::pair<std::size_t, Kind>> jobs;
  for (std::size_t k = 0; k < runs.size(); ++k)
    for (int kind = 0; kind < 7; ++kind)
      if (want[kind]) jobs.emplace_back(k, static_cast<Kind>(kind));

  parallel_for(jobs.size(), c.jobs, [&](std::size_t j) {
    auto& r = runs[jobs[j].first];
    const int save_every = static_cast<int>(std::lround(c.save_interval / r.dt));
    const GrenierRunConfig gcfg{.dt = r.dt, .T = c.T, .save_every = save_every};
    const Field zero(r.grid);
    switch (jobs[j].second) {
      case kNlsU: r.nls_u = run_nls_tracked(r.a0, r.eps, r.dt, c); break;
      case kNlsTilde: r.nls_tilde = run_nls_tracked(r.a0 + r.eps * r.a1, r.eps, r.dt, c); break;
      case kNlsControl: r.nls_control = run_nls_tracked(r.a0, r.eps, r.dt, c); break;
      case kGrenierU: r.grenier_u = solve_grenier(r.a0, zero, r.eps, gcfg); break;
      case kGrenierTilde: r.grenier_tilde = solve_grenier(r.a0, r.a1, r.eps, gcfg); break;
      case kLimitZero: r.limit_zero = solve_limit_with_corrector(r.a0, zero, gcfg); break;
      case kLimitTilde: r.limit_tilde = solve_limit_with_corrector(r.a0, r.a1, gcfg); break;
    }
  });
  return runs;
}

namespace detail {

inline std::string eps_label(double eps) {
  std::ostringstream os;
  os << eps;
  return os.str();
}

/// Fit value vs x for every s; rows with a nonpositive value make the fit degenerate.
inline void fit_family(StudyReport& rep, const std::string& quantity, const std::vector<double>& s_list,
                       double lo, double hi, const std::string& pass_label) {
  for (double s : s_list) {
    const auto rows = rep.select(quantity, s);
    std::vector<double> x, y;
    bool degenerate = rows.size() < 3;
    for (const auto& r : rows) {
      if (!(r.value > 0.0)) degenerate = true;
      x.push_back(r.x);
      y.push_back(r.value);
    }
    std::ostringstream name;
    name << quantity << " slope, s=" << s;
    if (degenerate) {
      rep.fits.push_back({quantity, s, SlopeFit{}, "degenerate"});
      rep.checks.push_back({name.str(), false, "fewer than 3 positive points"});
      continue;
    }
    const SlopeFit f = fit_loglog(x, y);
    const bool ok = f.within(lo, hi);
    rep.fits.push_back({quantity, s, f, ok ? pass_label : "out of band"});
    std::ostringstream detail;
    detail << "slope " << f.slope << " +/- " << f.band95 << ", band [" << lo << ", " << hi << "]";
    rep.checks.push_back({name.str(), ok, detail.str()});
  }
}

inline bool all_zero(const Field& f) {
  for (const auto& v : f.values)
    if (v != cplx{}) return false;
  return true;
}

inline Field with_phase(const Field& a, const Field& phase) {
  Field out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::polar(1.0, phase[i].real());
  return out;
}

inline bool has_control(const std::vector<EpsilonRun>& runs) {
  return !runs.empty() && runs.front().nls_control.has_value();
}

inline std::size_t snapshot_index(const SweepConfig& c, double t) {
  return static_cast<std::size_t>(std::lround(t / c.save_interval));
}

}  // namespace detail

/// ||u_NLS - a^eps e^{i phi^eps / eps}|| / ||u(0)|| at every saved time.
inline StudyReport oracle_equivalence_study(const SweepConfig& c, const std::vector<EpsilonRun>& runs) {
  StudyReport rep;
  rep.study = "oracle_equivalence";
  rep.notes.push_back("relative L2 distance between the NLS solution and the reconstructed phase-amplitude solution");
  for (const auto& r : runs) {
    const std::pair<const NlsRun*, const GrenierTrajectory*> fam[] = {
        {r.nls_u ? &*r.nls_u : nullptr, r.grenier_u ? &*r.grenier_u : nullptr},
        {r.nls_tilde ? &*r.nls_tilde : nullptr, r.grenier_tilde ? &*r.grenier_tilde : nullptr}};
    const char* names[] = {"oracle_u", "oracle_tilde"};
    for (int f = 0; f < 2; ++f) {
      if (!fam[f].first || !fam[f].second) continue;
      const auto& nls = *fam[f].first;
      const auto& gr = *fam[f].second;
      const double u0 = norm(nls.u.front());
      double worst = 0.0;
      for (std::size_t k = 0; k < nls.u.size(); ++k) {
        const auto& g = gr.snapshots.at(k);
        const Field rec = reconstruct(g.a, g.phi, r.eps, c.tail_tol);
        const double e = u0 > 0.0 ? norm(nls.u[k] - rec) / u0 : norm(nls.u[k] - rec);
        worst = std::max(worst, e);
        rep.add(std::string(names[f]) + "_t", r.eps, 0.0, e, {}, nls.times[k]);
      }
      rep.add(names[f], r.eps, 0.0, worst);
      std::ostringstream name, det;
      name << names[f] << " eps=" << r.eps;
      det << "max relative L2 distance " << worst << " (tol 1e-4)";
      rep.checks.push_back({name.str(), worst <= 1e-4, det.str()});
    }
  }
  return rep;
}

/// sup_t ||u - a e^{i phi/eps}||_{H^s_eps} (a1 = 0 run) and
/// sup_t ||u~ - a e^{i phi1} e^{i phi/eps}||_{H^s_eps} (perturbed run), fitted vs eps.
inline StudyReport wkb_error_study(const SweepConfig& c, const std::vector<EpsilonRun>& runs) {
  StudyReport rep;
  rep.study = "wkb_error";
  rep.notes.push_back(std::string("a1 mode: ") + to_string(c.a1_mode) + "; sup over saved t <= T");
  bool zero_data = true;
  for (const auto& r : runs) {
    const auto& lim = r.limit_tilde.value();
    const auto& u = r.nls_u.value();
    const auto& ut = r.nls_tilde.value();
    zero_data = zero_data && detail::all_zero(r.a0);
    std::vector<double> err_u(c.s_list.size(), 0.0), err_t(c.s_list.size(), 0.0);
    double l2_u = 0.0;
    for (std::size_t k = 0; k < u.u.size(); ++k) {
      const auto& snap = lim.snapshots.at(k);
      const Field prof_u = reconstruct(snap.background.a, snap.background.phi, r.eps, c.tail_tol);
      const Field prof_t = reconstruct(detail::with_phase(snap.background.a, snap.corrector.phi1),
                                       snap.background.phi, r.eps, c.tail_tol);
      const Field du = u.u[k] - prof_u;
      const Field dt = ut.u[k] - prof_t;
      l2_u = std::max(l2_u, l2_quadrature(du));
      for (std::size_t i = 0; i < c.s_list.size(); ++i) {
        const auto idx = SobolevIndex::h_eps(c.s_list[i], r.eps);
        err_u[i] = std::max(err_u[i], norm(du, idx));
        err_t[i] = std::max(err_t[i], norm(dt, idx));
      }
    }
    for (std::size_t i = 0; i < c.s_list.size(); ++i) {
      rep.add("wkb_err_u", r.eps, c.s_list[i], err_u[i]);
      rep.add("wkb_err_tilde", r.eps, c.s_list[i], err_t[i]);
    }
    rep.add("l2_err_u", r.eps, 0.0, l2_u);
  }
  if (zero_data) {
    rep.notes.push_back("a0 = 0: all errors vanish identically; no slope fitted");
    return rep;
  }
  if (runs.size() >= 3) {
    detail::fit_family(rep, "wkb_err_u", c.s_list, 0.8, 1.2, "order 1");
    detail::fit_family(rep, "wkb_err_tilde", c.s_list, 0.8, 1.2, "order 1");
  }
  return rep;
}

/// Expansion error sup_t (||a^eps - a - eps a1||_{H^s} + ||phi^eps - phi - eps phi1||_{H^s})
/// (order 2) and convergence error sup_t (||a^eps - a||_{H^s} + ||phi^eps - phi||_{H^s}) (order 1).
inline StudyReport corrector_order_study(const SweepConfig& c, const std::vector<EpsilonRun>& runs) {
  StudyReport rep;
  rep.study = "corrector_order";
  rep.notes.push_back(std::string("a1 mode: ") + to_string(c.a1_mode) + "; sup over saved t <= T");
  std::vector<std::string> fams;
  for (const auto& r : runs) {
    const std::pair<const GrenierTrajectory*, const LimitTrajectory*> pairs[] = {
        {r.grenier_u ? &*r.grenier_u : nullptr, r.limit_zero ? &*r.limit_zero : nullptr},
        {r.grenier_tilde ? &*r.grenier_tilde : nullptr, r.limit_tilde ? &*r.limit_tilde : nullptr}};
    const char* suffix[] = {"_u", "_tilde"};
    for (int f = 0; f < 2; ++f) {
      if (!pairs[f].first || !pairs[f].second) continue;
      const auto& gr = *pairs[f].first;
      const auto& lim = *pairs[f].second;
      std::vector<double> exp_err(c.s_list.size(), 0.0), conv_err(c.s_list.size(), 0.0);
      for (std::size_t k = 0; k < gr.snapshots.size(); ++k) {
        const auto& g = gr.snapshots[k];
        const auto& l = lim.snapshots.at(k);
        const Field da = g.a - l.background.a;
        const Field dp = g.phi - l.background.phi;
        const Field ea = da - r.eps * l.corrector.a1;
        const Field ep = dp - r.eps * l.corrector.phi1;
        for (std::size_t i = 0; i < c.s_list.size(); ++i) {
          const auto idx = SobolevIndex::h(c.s_list[i]);
          exp_err[i] = std::max(exp_err[i], norm(ea, idx) + norm(ep, idx));
          conv_err[i] = std::max(conv_err[i], norm(da, idx) + norm(dp, idx));
        }
      }
      for (std::size_t i = 0; i < c.s_list.size(); ++i) {
        rep.add(std::string("expansion") + suffix[f], r.eps, c.s_list[i], exp_err[i]);
        rep.add(std::string("convergence") + suffix[f], r.eps, c.s_list[i], conv_err[i]);
      }
      if (std::find(fams.begin(), fams.end(), suffix[f]) == fams.end()) fams.push_back(suffix[f]);
    }
  }
  if (runs.size() >= 3)
    for (const auto& sfx : fams) {
      detail::fit_family(rep, "expansion" + sfx, c.s_list, 1.7, 2.3, "order 2");
      detail::fit_family(rep, "convergence" + sfx, c.s_list, 0.8, 1.2, "order 1");
    }
  return rep;
}

/// r(t) = ||phi(t) + t|a0|^2||_{H^s}, r1(t) = ||phi1(t) + 2t|a0|^2||_{H^s} on
/// t = T 2^{-m}, from the eps = 0 run with corrector and a1 = a0.
inline StudyReport small_time_study(const Field& a0, double T, int levels,
                                    const std::vector<double>& s_list, double dt_max,
                                    bool check_decay = true) {
  require(levels >= 2, "small_time_study: need at least 3 dyadic times");
  StudyReport rep;
  rep.study = "small_time";
  rep.x_label = "t";
  rep.notes.push_back("eps = 0 run with corrector, a1 = a0; t = T 2^{-m}");
  const double t_min = T * std::ldexp(1.0, -levels);
  const double dt = t_min / std::ceil(t_min / std::min(dt_max, t_min) - 1e-9);
  const int every = static_cast<int>(std::lround(t_min / dt));
  GrenierRunConfig cfg{.dt = dt, .T = T, .save_every = every};
  cfg.check_decay = check_decay;
  Field rho(a0.grid);
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(a0[i]);

  solve_limit_with_corrector(
      a0, a0, cfg,
      [&](const LimitSnapshot& s) {
        const double t = s.background.t;
        if (t <= 0.0) return;
        const double m = std::log2(T / t);
        if (std::abs(m - std::round(m)) > 1e-9) return;
        const Field r = s.background.phi + t * rho;
        const Field r1 = s.corrector.phi1 + 2.0 * t * rho;
        for (double sv : s_list) {
          rep.add("r_phi", t, sv, norm(r, SobolevIndex::h(sv)));
          rep.add("r_phi1", t, sv, norm(r1, SobolevIndex::h(sv)));
        }
      },
      false);
  std::stable_sort(rep.rows.begin(), rep.rows.end(),
            [](const ReportRow& a, const ReportRow& b) { return a.x > b.x; });
  detail::fit_family(rep, "r_phi", s_list, 2.7, 3.3, "t^3");
  detail::fit_family(rep, "r_phi1", s_list, 2.7, 3.3, "t^3");
  return rep;
}

inline StudyReport small_time_study(const SweepConfig& c) {
  validate(c);
  auto g = make_grid(1, c.half_width, grid_points_for(c, c.eps_list.front()), c.max_points);
  return small_time_study(make_a0(c, g), c.T, c.small_time_levels, c.s_list, c.dt_max);
}

/// D_s(eps) = eps^{s+1-N} ||u(tau) - u~(tau)||_{Hdot^s}, u~(0) = a0 + eps a1
/// (N = 1 with a1 = a0 is the ghost effect; a1 = eps^{N-1} a0 its higher-order
/// variant). Also the profile prediction P_s from the eps = 0 run with
/// corrector, the ratio D_s / P_s, the identical-data control, and optionally
/// the grid-refinement change.
inline StudyReport ghost_study(const SweepConfig& c, const std::vector<EpsilonRun>& runs,
                               const std::vector<EpsilonRun>* refined = nullptr,
                               double stabilization_tol = 0.25) {
  const int order = c.a1_mode == A1Mode::scaled ? c.ghost_order : 1;
  StudyReport rep;
  rep.study = order == 1 ? "ghost_separation" : "ghost_higher_order";
  {
    std::ostringstream os;
    os << "tau = " << c.tau << ", order N = " << order << ", a1 mode " << to_string(c.a1_mode)
       << "; weight eps^(s+1-N)";
    rep.notes.push_back(os.str());
  }
  const std::size_t k_tau = detail::snapshot_index(c, c.tau);
  const double floor = c.floor_factor * norm(runs.front().a0);

  for (std::size_t e = 0; e < runs.size(); ++e) {
    const auto& r = runs[e];
    const Field& u = r.nls_u.value().u.at(k_tau);
    const Field& ut = r.nls_tilde.value().u.at(k_tau);
    const Field diff = u - ut;
    const Field swapped = ut - u;
    std::optional<Field> profile_diff;
    if (r.limit_tilde) {
      const auto& snap = r.limit_tilde->snapshots.at(k_tau);
      Field w = reconstruct(snap.background.a, snap.background.phi, r.eps, c.tail_tol);
      Field shifted = detail::with_phase(w, snap.corrector.phi1);
      profile_diff = w - shifted;
    }
    double l4 = 0.0;
    for (const auto& v : diff.values) l4 += std::norm(v) * std::norm(v);
    rep.add("diff_l4_4", r.eps, 0.0, l4 * diff.grid->cell_volume());
    for (double s : c.s_list) {
      const double weight = std::pow(r.eps, s + 1.0 - order);
      const double raw = norm(diff, SobolevIndex::hdot(s));
      const double d = weight * raw;
      rep.add("diff_hdot", r.eps, s, raw);
      rep.add("D", r.eps, s, d);
      rep.add("D_swapped", r.eps, s, weight * norm(swapped, SobolevIndex::hdot(s)));
      if (profile_diff) {
        const double p = weight * norm(*profile_diff, SobolevIndex::hdot(s));
        rep.add("P", r.eps, s, p);
        const double ratio = p > 0.0 ? d / p : std::nan("");
        rep.add("ratio", r.eps, s, ratio,
                (ratio >= 0.5 && ratio <= 2.0) ? "resolved" : "under-resolved");
      }
      if (r.nls_control) {
        const Field& uc = r.nls_control->u.at(k_tau);
        rep.add("control", r.eps, s, weight * norm(u - uc, SobolevIndex::hdot(s)));
      }
      if (refined) {
        const auto& rr = refined->at(e);
        const Field dref = rr.nls_u.value().u.at(k_tau) - rr.nls_tilde.value().u.at(k_tau);
        const double dr = weight * norm(dref, SobolevIndex::hdot(s));
        const double change = d > 0.0 ? std::abs(dr - d) / d : std::abs(dr - d);
        rep.add("refine_change", r.eps, s, change, change < 0.05 ? "grid-independent" : "grid-dependent");
      }
    }
  }

  for (double s : c.s_list) {
    const auto rows = rep.select("D", s);
    double dmax = 0.0;
    for (const auto& row : rows) dmax = std::max(dmax, row.value);
    std::ostringstream name;
    name << rep.study << " s=" << s;
    if (rows.size() < 2) {
      rep.checks.push_back({name.str(), false, "need at least two eps values"});
      continue;
    }
    const double d1 = rows[rows.size() - 2].value;
    const double d2 = rows[rows.size() - 1].value;
    const double fine_min = std::min(d1, d2);
    // Symmetric relative spread |d1 - d2| / max(d1, d2).
    const double spread = std::max(d1, d2) > 0.0 ? std::abs(d1 - d2) / std::max(d1, d2) : std::nan("");
    const bool stable = spread <= stabilization_tol;
    const bool above_floor = fine_min >= floor && fine_min > 0.0;
    const bool separated = stable && above_floor;
    rep.add("half_max_rule", rows.back().x, s, fine_min >= 0.5 * dmax ? 1.0 : 0.0,
            fine_min >= 0.5 * dmax ? "finest >= max/2" : "finest < max/2");
    rep.add("separation", rows.back().x, s, spread, separated ? "separated" : "not separated");
    std::ostringstream det;
    det << "two finest D = " << d1 << ", " << d2 << " (spread " << spread << ", tol "
        << stabilization_tol << "); floor " << floor << "; max D over sweep " << dmax;
    rep.checks.push_back({name.str(), separated, det.str()});

    if (detail::has_control(runs)) {
      double worst = 0.0;
      for (const auto& row : rep.select("control", s)) worst = std::max(worst, row.value);
      std::ostringstream cn, cd;
      cn << "control s=" << s;
      cd << "identical-data difference " << worst << " (tol 1e-10)";
      rep.checks.push_back({cn.str(), worst <= 1e-10, cd.str()});
    }
    if (refined) {
      double worst = 0.0;
      for (const auto& row : rep.select("refine_change", s)) worst = std::max(worst, row.value);
      std::ostringstream rn, rd;
      rn << "grid independence s=" << s;
      rd << "max relative change of D under N -> 2N: " << worst << " (tol 0.05)";
      rep.checks.push_back({rn.str(), worst < 0.05, rd.str()});
    }
  }
  return rep;
}

/// sup_t ||phi1(t)||_inf for the eps = 0 run with corrector and the configured a1.
inline StudyReport corrector_degeneracy_study(const SweepConfig& c) {
  validate(c);
  auto g = make_grid(1, c.half_width, grid_points_for(c, c.eps_list.front()), c.max_points);
  const Field a0 = make_a0(c, g);
  const Field a1 = make_a1(c.a1_mode, c.ghost_order, a0, c.eps_list.front());
  const double dt = dt_for(c, *g, c.eps_list.front());
  const int every = static_cast<int>(std::lround(c.save_interval / dt));
  StudyReport rep;
  rep.study = "corrector_degeneracy";
  rep.x_label = "t";
  rep.notes.push_back(std::string("a1 mode: ") + to_string(c.a1_mode));
  double worst = 0.0, worst_re = 0.0;
  solve_limit_with_corrector(
      a0, a1, GrenierRunConfig{.dt = dt, .T = c.T, .save_every = every},
      [&](const LimitSnapshot& s) {
        const double v = linf_norm(s.corrector.phi1);
        Field re(s.background.a.grid);
        for (std::size_t i = 0; i < re.size(); ++i)
          re[i] = (std::conj(s.background.a[i]) * s.corrector.a1[i]).real();
        worst = std::max(worst, v);
        worst_re = std::max(worst_re, linf_norm(re));
        rep.add("phi1_linf", s.background.t, 0.0, v);
      },
      false);
  rep.add("phi1_linf_sup", c.T, 0.0, worst);
  rep.add("re_conj_a_a1_sup", c.T, 0.0, worst_re);
  std::ostringstream det;
  det << "sup_t ||phi1||_inf = " << worst << " (tol 1e-8)";
  rep.checks.push_back({"phi1 degeneracy", worst <= 1e-8, det.str()});
  return rep;
}

/// Mass and semiclassical-energy drift of every NLS run in the sweep.
inline StudyReport conservation_study(const std::vector<EpsilonRun>& runs, double mass_tol = 1e-10,
                                      double energy_tol = 1e-6) {
  StudyReport rep;
  rep.study = "conservation";
  double wm = 0.0, we = 0.0;
  for (const auto& r : runs)
    for (const auto* run : {r.nls_u ? &*r.nls_u : nullptr, r.nls_tilde ? &*r.nls_tilde : nullptr,
                            r.nls_control ? &*r.nls_control : nullptr}) {
      if (!run) continue;
      rep.add("mass_drift", r.eps, 0.0, run->mass_drift);
      rep.add("energy_drift", r.eps, 0.0, run->energy_drift);
      wm = std::max(wm, run->mass_drift);
      we = std::max(we, run->energy_drift);
    }
  std::ostringstream dm, de;
  dm << "max relative mass drift " << wm << " (tol " << mass_tol << ")";
  de << "max relative energy drift " << we << " (tol " << energy_tol << ")";
  rep.checks.push_back({"mass conservation", wm < mass_tol, dm.str()});
  rep.checks.push_back({"energy conservation", we < energy_tol, de.str()});
  return rep;
}

// Convenience wrappers running exactly what each study needs.

inline StudyReport wkb_error_study(const SweepConfig& c) {
  return wkb_error_study(c, run_sweep(c, RunNeeds{.nls_u = true, .nls_tilde = true, .limit_tilde = true}));
}

inline StudyReport ghost_separation_study(SweepConfig c) {
  c.a1_mode = A1Mode::equal_a0;
  c.ghost_order = 1;
  const RunNeeds needs{.nls_u = true, .nls_tilde = true, .nls_control = true, .limit_tilde = true};
  const auto runs = run_sweep(c, needs);
  if (!c.refinement_check) return ghost_study(c, runs);
  const auto fine = run_sweep(c, RunNeeds{.nls_u = true, .nls_tilde = true}, 2);
  return ghost_study(c, runs, &fine);
}

inline StudyReport ghost_higher_order_study(SweepConfig c, int order) {
  require(order >= 1, "ghost_higher_order_study: N must be >= 1");
  c.a1_mode = A1Mode::scaled;
  c.ghost_order = order;
  const RunNeeds needs{.nls_u = true, .nls_tilde = true, .nls_control = true, .limit_tilde = true};
  const auto runs = run_sweep(c, needs);
  const auto* fine_ptr = static_cast<const std::vector<EpsilonRun>*>(nullptr);
  std::vector<EpsilonRun> fine;
  if (c.refinement_check) {
    fine = run_sweep(c, RunNeeds{.nls_u = true, .nls_tilde = true}, 2);
    fine_ptr = &fine;
  }
  return ghost_study(c, runs, fine_ptr, 0.30);
}

/// Two-grid realization of psi(t, x) = j^{n/2-s} u(j^{s_c+2-s} t, j x) with
/// eps = j^{s-s_c}: evolves u^eps on [-L, L)^n and psi (eps = 1) on
/// [-L/j, L/j)^n with the same N and mapped time steps, then compares
/// ||psi(t)||_{Hdot^m} with j^{m-s} ||u(j^{s_c+2-s} t)||_{Hdot^m}.
inline StudyReport two_grid_scaling_study(int dim, double s, const std::vector<int>& j_list,
                                          const std::vector<double>& m_list, double half_width,
                                          int points, double tau, int steps) {
  const double sc = dim / 2.0 - 1.0;
  require(s < sc, "two_grid_scaling_study: need s < s_c = n/2 - 1");
  require(steps >= 1 && tau > 0.0, "two_grid_scaling_study: need tau > 0 and steps >= 1");
  StudyReport rep;
  rep.study = "two_grid_scaling";
  rep.x_label = "j";
  {
    std::ostringstream os;
    os << "n = " << dim << ", s = " << s << ", s_c = " << sc << ", tau = " << tau;
    rep.notes.push_back(os.str());
  }
  double worst = 0.0;
  for (int j : j_list) {
    require(j >= 1, "two_grid_scaling_study: j must be >= 1");
    const double eps = std::pow(j, s - sc);
    const double time_scale = std::pow(j, sc + 2.0 - s);
    auto gu = make_grid(dim, half_width, points);
    auto gp = make_grid(dim, half_width / j, points);
    const Field u0 = make_gaussian(gu, 1.0, 1.0);
    Field psi0(gp);
    const double amp = std::pow(j, dim / 2.0 - s);
    for (std::size_t i = 0; i < psi0.size(); ++i) psi0[i] = amp * u0[i];
    const auto tu = solve_nls(u0, eps, NlsRunConfig{tau / steps, tau, steps, 1.0});
    const double tpsi = tau / time_scale;
    const auto tp = solve_nls(psi0, 1.0, NlsRunConfig{tpsi / steps, tpsi, steps, 1.0});
    for (std::size_t k = 0; k < tu.snapshots.size(); ++k)
      for (double m : m_list) {
        const double lhs = norm(tp.snapshots[k].u, SobolevIndex::hdot(m));
        const double rhs = std::pow(j, m - s) * norm(tu.snapshots[k].u, SobolevIndex::hdot(m));
        const double rel = std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
        worst = std::max(worst, rel);
        rep.add("rel_mismatch", j, m, rel, {}, tp.snapshots[k].t);
      }
  }
  std::ostringstream det;
  det << "max relative mismatch " << worst << " (tol 1e-8)";
  rep.checks.push_back({"two-grid Hdot^m scaling", worst <= 1e-8, det.str()});
  return rep;
}

}  // namespace scnls
