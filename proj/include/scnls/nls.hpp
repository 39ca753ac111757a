#pragma once

// Strang split-step Fourier integrator for the semiclassical cubic NLS
//   i eps u_t + (eps^2/2) Lap u = |u|^2 u.
// Both sub-flows are solved exactly; eps = 1 is the unscaled equation.

#include <cmath>
#include <cstddef>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "scnls/grid.hpp"

namespace scnls {

struct NlsState {
  double t = 0.0;
  Field u;
  double eps = 1.0;
};

struct NlsRunConfig {
  double dt = 0.0;
  double T = 0.0;
  int save_every = 1;
  double tail_tol = 1e-6;
  std::size_t max_steps = 50'000'000;
};

struct NlsTrajectory {
  std::vector<NlsState> snapshots;
  double dt = 0.0;  // effective step, T / steps
  std::size_t steps = 0;
};

using NlsObserver = std::function<void(const NlsState&)>;

/// 0.5 min(eps dx, dx^2 / eps): resolves the 1/eps nonlinear phase rate and
/// the fastest kinetic phase on the grid.
inline double default_nls_dt(const Grid& g, double eps) {
  const double dx = g.spacing();
  return 0.5 * std::min(eps * dx, dx * dx / eps);
}

inline void validate_eps(double eps) {
  require(std::isfinite(eps) && eps > 0.0 && eps <= 1.0, "nls: eps must lie in (0, 1]");
}

/// Steps actually taken: the smallest count whose uniform step does not exceed cfg.dt.
inline std::size_t step_count(const NlsRunConfig& cfg) {
  require(std::isfinite(cfg.dt) && cfg.dt > 0.0, "run config: dt must be positive");
  require(std::isfinite(cfg.T) && cfg.T > 0.0, "run config: T must be positive");
  require(cfg.dt <= cfg.T, "run config: dt must not exceed T");
  require(cfg.save_every >= 1, "run config: save_every must be >= 1");
  const double raw = std::ceil(cfg.T / cfg.dt - 1e-9);
  require(raw <= static_cast<double>(cfg.max_steps), "run config: T/dt exceeds the step budget");
  return static_cast<std::size_t>(raw);
}

inline double mass(const Field& f) {
  const double l2 = l2_quadrature(f.space == Space::physical ? f : inverse_transform(f));
  return l2 * l2;
}

/// eps^2 int |grad u|^2 + int |u|^4; twice the Hamiltonian of the flow.
inline double semiclassical_energy(const NlsState& st) {
  const Field& u = st.u;
  require_space(u, Space::physical, "semiclassical_energy");
  const double grad = norm(u, SobolevIndex::hdot(1.0));
  double quartic = 0.0;
  for (const auto& v : u.values) quartic += std::norm(v) * std::norm(v);
  quartic *= u.grid->cell_volume();
  return st.eps * st.eps * grad * grad + quartic;
}

/// uhat <- exp(-i eps |kappa|^2 tau / 2) uhat.
inline NlsState kinetic_substep(const NlsState& st, double tau) {
  require_space(st.u, Space::physical, "kinetic_substep");
  NlsState out = st;
  const Grid& g = *st.u.grid;
  g.forward(out.u.values);
  const auto k2 = g.kappa_squared();
  for (std::size_t i = 0; i < g.size(); ++i)
    out.u[i] *= std::polar(1.0, -0.5 * st.eps * k2[i] * tau);
  g.backward(out.u.values);
  out.t = st.t + tau;
  return out;
}

/// u <- u exp(-i |u|^2 tau / eps); |u| is invariant under this sub-flow.
inline NlsState nonlinear_substep(const NlsState& st, double tau) {
  require_space(st.u, Space::physical, "nonlinear_substep");
  NlsState out = st;
  for (auto& v : out.u.values) v *= std::polar(1.0, -std::norm(v) * tau / st.eps);
  out.t = st.t + tau;
  return out;
}

/// Kinetic half step, nonlinear full step, kinetic half step. dt may be negative.
inline NlsState strang_step(const NlsState& st, double dt) {
  NlsState out = kinetic_substep(st, 0.5 * dt);
  out = nonlinear_substep(out, dt);
  out = kinetic_substep(out, 0.5 * dt);
  out.t = st.t + dt;
  return out;
}

namespace detail {

inline bool all_finite(const Field& f) {
  for (const auto& v : f.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

inline void check_resolution(const Field& u, double tail_tol, double t, double last_good,
                             const char* who) {
  const double tail = tail_fraction(u);
  if (!(tail <= tail_tol)) {
    std::ostringstream msg;
    msg << who << ": resolution guard tripped at t=" << t << ": spectral tail fraction " << tail
        << " > tail_tol " << tail_tol << " (refine the grid)";
    throw SolverGuardError(msg.str(), last_good);
  }
}

}  // namespace detail

/// Integrates from u0 over [0, T]. Snapshots (t = 0 and every save_every steps,
/// plus the final time) are passed to `observer` and, if keep_snapshots,
/// returned. Guard trips throw SolverGuardError; the observer has then already
/// seen the last good snapshot.
inline NlsTrajectory solve_nls(const Field& u0, double eps, const NlsRunConfig& cfg,
                               const NlsObserver& observer = {}, bool keep_snapshots = true) {
  validate_eps(eps);
  require_space(u0, Space::physical, "solve_nls");
  const std::size_t steps = step_count(cfg);
  const double dt = cfg.T / static_cast<double>(steps);
  const Grid& g = *u0.grid;

  NlsTrajectory traj;
  traj.dt = dt;
  traj.steps = steps;

  std::vector<cplx> half(g.size()), full(g.size());
  const auto k2 = g.kappa_squared();
  for (std::size_t i = 0; i < g.size(); ++i) {
    half[i] = std::polar(1.0, -0.25 * eps * k2[i] * dt);
    full[i] = half[i] * half[i];
  }

  NlsState st{0.0, u0, eps};
  double last_good = 0.0;
  auto emit = [&](const NlsState& s) {
    detail::check_resolution(s.u, cfg.tail_tol, s.t, last_good, "solve_nls");
    last_good = s.t;
    if (observer) observer(s);
    if (keep_snapshots) traj.snapshots.push_back(s);
  };
  emit(st);

  const double nl_rate = dt / eps;
  std::size_t done = 0;
  while (done < steps) {
    const std::size_t block = std::min<std::size_t>(cfg.save_every, steps - done);
    // Consecutive kinetic half steps are fused into one full step inside a block.
    g.forward(st.u.values);
    for (std::size_t i = 0; i < g.size(); ++i) st.u[i] *= half[i];
    g.backward(st.u.values);
    for (std::size_t k = 0; k < block; ++k) {
      for (auto& v : st.u.values) v *= std::polar(1.0, -std::norm(v) * nl_rate);
      g.forward(st.u.values);
      const auto& mult = (k + 1 == block) ? half : full;
      for (std::size_t i = 0; i < g.size(); ++i) st.u[i] *= mult[i];
      g.backward(st.u.values);
      if (!detail::all_finite(st.u)) {
        std::ostringstream msg;
        msg << "solve_nls: non-finite values at t=" << (done + k + 1) * dt;
        throw SolverGuardError(msg.str(), last_good);
      }
    }
    done += block;
    st.t = static_cast<double>(done) * dt;
    emit(st);
  }
  return traj;
}

}  // namespace scnls
