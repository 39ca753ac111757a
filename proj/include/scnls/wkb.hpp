#pragma once

// Phase-amplitude (Grenier) formulation of the semiclassical NLS,
//   phi_t + |grad phi|^2 / 2 + |a|^2 = 0,
//   a_t + grad phi . grad a + a Lap phi / 2 = i (eps/2) Lap a,
// its eps = 0 limit, and the first-order corrector (a1, phi1) of the
// eps-expansion. Pseudo-spectral in space, classical RK4 in time, with the
// 2/3 rule applied to every nonlinear right-hand side.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scnls/grid.hpp"
#include "scnls/nls.hpp"

namespace scnls {

struct GrenierState {
  double t = 0.0;
  Field a;
  Field phi;  // real-valued, stored complex with zero imaginary part
  double eps = 0.0;
};

struct CorrectorState {
  double t = 0.0;
  Field a1;
  Field phi1;
};

struct GrenierRunConfig {
  double dt = 0.0;
  double T = 0.0;
  int save_every = 1;
  /// Abort threshold for ||grad phi||_inf; default derived from the data.
  std::optional<double> sing_tol{};
  bool dealias = true;
  /// Require a0, a1 to decay at the periodic boundary (Schwartz-like data).
  bool check_decay = true;
  std::size_t max_steps = 50'000'000;
};

struct GrenierRates {
  Field da;
  Field dphi;
  double grad_phi_max = 0.0;
};

struct CorrectorRates {
  Field da1;
  Field dphi1;
};

struct GrenierTrajectory {
  std::vector<GrenierState> snapshots;
  std::vector<double> grad_phi_max;  // one per snapshot
  std::vector<std::string> warnings;
  double dt = 0.0;
  std::size_t steps = 0;
  double sing_tol = 0.0;
};

struct LimitSnapshot {
  GrenierState background;  // eps = 0
  CorrectorState corrector;
  double grad_phi_max = 0.0;
};

struct LimitTrajectory {
  std::vector<LimitSnapshot> snapshots;
  double dt = 0.0;
  std::size_t steps = 0;
  double sing_tol = 0.0;
};

using GrenierObserver = std::function<void(const GrenierState&, double grad_phi_max)>;
using LimitObserver = std::function<void(const LimitSnapshot&)>;

namespace detail {

struct Calculus {
  Field value;
  std::vector<Field> grad;
  Field lap;
};

/// One forward transform, then gradient and Laplacian back in physical space.
inline Calculus calculus(const Field& f) {
  const Field fhat = transform(f);
  Calculus c{f, {}, inverse_transform(spectral_laplacian(fhat))};
  for (int d = 0; d < f.grid->dim(); ++d)
    c.grad.push_back(inverse_transform(spectral_derivative(fhat, d)));
  return c;
}

inline void dealias_physical(Field& f) {
  f.grid->forward(f.values);
  f.space = Space::spectral;
  dealias(f);
  f.grid->backward(f.values);
  f.space = Space::physical;
}

inline void project_real(Field& f) {
  for (auto& v : f.values) v = cplx(v.real(), 0.0);
}

inline double max_gradient_magnitude(const std::vector<Field>& grad) {
  double m = 0.0;
  const std::size_t n = grad.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& g : grad) s += g[i].real() * g[i].real();
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

inline void check_singularity(double grad_max, double sing_tol, double t) {
  if (grad_max > sing_tol) {
    std::ostringstream msg;
    msg << "grenier: singularity guard tripped at t=" << t << ": ||grad phi||_inf = " << grad_max
        << " > sing_tol " << sing_tol;
    throw SolverGuardError(msg.str(), t);
  }
}

// grad p . grad q, with grad p real.
inline cplx dot_real_grad(const std::vector<Field>& gp, const std::vector<Field>& gq,
                          std::size_t i) {
  cplx acc{};
  for (std::size_t d = 0; d < gp.size(); ++d) acc += gp[d][i].real() * gq[d][i];
  return acc;
}

inline GrenierRates grenier_rates(const Calculus& A, const Calculus& P, double eps) {
  const std::size_t n = A.value.size();
  GrenierRates r{Field(A.value.grid), Field(A.value.grid), max_gradient_magnitude(P.grad)};
  const cplx half_i_eps(0.0, 0.5 * eps);
  for (std::size_t i = 0; i < n; ++i) {
    double gp2 = 0.0;
    for (const auto& g : P.grad) gp2 += g[i].real() * g[i].real();
    const cplx a = A.value[i];
    r.dphi[i] = -0.5 * gp2 - std::norm(a);
    r.da[i] = -dot_real_grad(P.grad, A.grad, i) - 0.5 * a * P.lap[i].real() + half_i_eps * A.lap[i];
  }
  return r;
}

inline CorrectorRates corrector_rates(const Calculus& A, const Calculus& P, const Calculus& A1,
                                      const Calculus& P1) {
  const std::size_t n = A.value.size();
  CorrectorRates r{Field(A.value.grid), Field(A.value.grid)};
  const cplx half_i(0.0, 0.5);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx a = A.value[i];
    const cplx a1 = A1.value[i];
    r.dphi1[i] = -dot_real_grad(P.grad, P1.grad, i) - 2.0 * (std::conj(a) * a1).real();
    r.da1[i] = -dot_real_grad(P.grad, A1.grad, i) - dot_real_grad(P1.grad, A.grad, i) -
               0.5 * a1 * P.lap[i].real() - 0.5 * a * P1.lap[i].real() + half_i * A.lap[i];
  }
  return r;
}

// Classical RK4 on a bundle of fields.
using Bundle = std::vector<Field>;
using BundleRhs = std::function<Bundle(const Bundle&)>;

inline Bundle axpy(const Bundle& y, double h, const Bundle& k) {
  Bundle out = y;
  for (std::size_t f = 0; f < out.size(); ++f)
    for (std::size_t i = 0; i < out[f].size(); ++i) out[f][i] += h * k[f][i];
  return out;
}

inline Bundle rk4_step(const Bundle& y, double dt, const BundleRhs& rhs) {
  const Bundle k1 = rhs(y);
  const Bundle k2 = rhs(axpy(y, 0.5 * dt, k1));
  const Bundle k3 = rhs(axpy(y, 0.5 * dt, k2));
  const Bundle k4 = rhs(axpy(y, dt, k3));
  Bundle out = y;
  for (std::size_t f = 0; f < out.size(); ++f)
    for (std::size_t i = 0; i < out[f].size(); ++i)
      out[f][i] += dt / 6.0 * (k1[f][i] + 2.0 * k2[f][i] + 2.0 * k3[f][i] + k4[f][i]);
  return out;
}

inline std::size_t grenier_steps(const GrenierRunConfig& cfg) {
  return step_count(NlsRunConfig{cfg.dt, cfg.T, cfg.save_every, 1.0, cfg.max_steps});
}

}  // namespace detail

/// 50 T ||grad |a(0)|^2||_inf: fifty times the first-order Taylor bound of
/// ||grad phi||_inf over the run, since phi_t(0) = -|a(0)|^2.
inline double default_sing_tol(const Field& a_init, double T) {
  Field rho(a_init.grid);
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(a_init[i]);
  const double g = detail::max_gradient_magnitude(gradient(rho));
  return 50.0 * T * g + 1e-8;
}

inline GrenierRates grenier_rhs(const GrenierState& st, bool dealias_products = true,
                                double sing_tol = std::numeric_limits<double>::infinity()) {
  require_space(st.a, Space::physical, "grenier_rhs");
  require_space(st.phi, Space::physical, "grenier_rhs");
  require(st.eps >= 0.0, "grenier_rhs: eps must be >= 0");
  GrenierRates r = detail::grenier_rates(detail::calculus(st.a), detail::calculus(st.phi), st.eps);
  detail::check_singularity(r.grad_phi_max, sing_tol, st.t);
  if (dealias_products) {
    detail::dealias_physical(r.da);
    detail::dealias_physical(r.dphi);
  }
  detail::project_real(r.dphi);
  return r;
}

inline CorrectorRates corrector_rhs(const GrenierState& background, const CorrectorState& corr,
                                    bool dealias_products = true) {
  require(background.eps == 0.0, "corrector_rhs: background must be the eps = 0 solution");
  require(std::abs(background.t - corr.t) <= 1e-12 * std::max(1.0, std::abs(corr.t)),
          "corrector_rhs: background and corrector times differ");
  CorrectorRates r = detail::corrector_rates(detail::calculus(background.a),
                                             detail::calculus(background.phi),
                                             detail::calculus(corr.a1), detail::calculus(corr.phi1));
  if (dealias_products) {
    detail::dealias_physical(r.da1);
    detail::dealias_physical(r.dphi1);
  }
  detail::project_real(r.dphi1);
  return r;
}

/// RK4 for (a^eps, phi^eps) with a(0) = a0 + eps a1, phi(0) = 0. With eps = 0
/// the datum is a0 alone and a1 is ignored (a warning is recorded).
inline GrenierTrajectory solve_grenier(const Field& a0, const Field& a1, double eps,
                                       const GrenierRunConfig& cfg,
                                       const GrenierObserver& observer = {},
                                       bool keep_snapshots = true) {
  require(std::isfinite(eps) && eps >= 0.0 && eps <= 1.0, "solve_grenier: eps must lie in [0, 1]");
  require_space(a0, Space::physical, "solve_grenier");
  require_space(a1, Space::physical, "solve_grenier");
  require(a0.grid == a1.grid, "solve_grenier: a0 and a1 must share a grid");
  if (cfg.check_decay) {
    check_boundary_decay(a0, std::max(1.0, linf_norm(a0)), kDecayTol, "solve_grenier a0");
    check_boundary_decay(a1, std::max(1.0, linf_norm(a1)), kDecayTol, "solve_grenier a1");
  }

  const std::size_t steps = detail::grenier_steps(cfg);
  const double dt = cfg.T / static_cast<double>(steps);

  GrenierTrajectory traj;
  traj.dt = dt;
  traj.steps = steps;

  Field a_init = a0;
  if (eps == 0.0) {
    if (linf_norm(a1) > 0.0)
      traj.warnings.push_back("solve_grenier: eps = 0, the a1 datum is ignored");
  } else {
    a_init = a0 + eps * a1;
  }
  traj.sing_tol = cfg.sing_tol.value_or(default_sing_tol(a_init, cfg.T));

  detail::Bundle y{a_init, Field(a0.grid)};
  double grad_max = 0.0;
  double t_now = 0.0;
  const auto rhs = [&](const detail::Bundle& b) {
    GrenierRates r = grenier_rhs(GrenierState{t_now, b[0], b[1], eps}, cfg.dealias, traj.sing_tol);
    return detail::Bundle{std::move(r.da), std::move(r.dphi)};
  };
  auto emit = [&](double t) {
    grad_max = detail::max_gradient_magnitude(gradient(y[1]));
    detail::check_singularity(grad_max, traj.sing_tol, t);
    GrenierState s{t, y[0], y[1], eps};
    if (observer) observer(s, grad_max);
    if (keep_snapshots) {
      traj.snapshots.push_back(std::move(s));
      traj.grad_phi_max.push_back(grad_max);
    }
  };
  emit(0.0);
  for (std::size_t step = 1; step <= steps; ++step) {
    t_now = static_cast<double>(step - 1) * dt;
    y = detail::rk4_step(y, dt, rhs);
    detail::project_real(y[1]);
    if (!detail::all_finite(y[0]) || !detail::all_finite(y[1])) {
      std::ostringstream msg;
      msg << "solve_grenier: non-finite values at t=" << step * dt;
      throw SolverGuardError(msg.str(), (step - 1) * dt);
    }
    if (step % cfg.save_every == 0 || step == steps) emit(static_cast<double>(step) * dt);
  }
  return traj;
}

/// Co-integrates the eps = 0 system with the corrector as one coupled RK4
/// flow: a(0) = a0, phi(0) = 0, a1(0) = a1, phi1(0) = 0.
inline LimitTrajectory solve_limit_with_corrector(const Field& a0, const Field& a1,
                                                  const GrenierRunConfig& cfg,
                                                  const LimitObserver& observer = {},
                                                  bool keep_snapshots = true) {
  require_space(a0, Space::physical, "solve_limit_with_corrector");
  require_space(a1, Space::physical, "solve_limit_with_corrector");
  require(a0.grid == a1.grid, "solve_limit_with_corrector: a0 and a1 must share a grid");
  if (cfg.check_decay) {
    check_boundary_decay(a0, std::max(1.0, linf_norm(a0)), kDecayTol, "solve_limit a0");
    check_boundary_decay(a1, std::max(1.0, linf_norm(a1)), kDecayTol, "solve_limit a1");
  }

  const std::size_t steps = detail::grenier_steps(cfg);
  const double dt = cfg.T / static_cast<double>(steps);

  LimitTrajectory traj;
  traj.dt = dt;
  traj.steps = steps;
  traj.sing_tol = cfg.sing_tol.value_or(default_sing_tol(a0, cfg.T));

  const GridPtr& g = a0.grid;
  detail::Bundle y{a0, Field(g), a1, Field(g)};
  double t_now = 0.0;
  const auto rhs = [&](const detail::Bundle& b) {
    const auto A = detail::calculus(b[0]);
    const auto P = detail::calculus(b[1]);
    GrenierRates r = detail::grenier_rates(A, P, 0.0);
    detail::check_singularity(r.grad_phi_max, traj.sing_tol, t_now);
    CorrectorRates c = detail::corrector_rates(A, P, detail::calculus(b[2]), detail::calculus(b[3]));
    detail::Bundle out{std::move(r.da), std::move(r.dphi), std::move(c.da1), std::move(c.dphi1)};
    for (auto& f : out)
      if (cfg.dealias) detail::dealias_physical(f);
    detail::project_real(out[1]);
    detail::project_real(out[3]);
    return out;
  };
  auto emit = [&](double t) {
    const double grad_max = detail::max_gradient_magnitude(gradient(y[1]));
    detail::check_singularity(grad_max, traj.sing_tol, t);
    LimitSnapshot s{GrenierState{t, y[0], y[1], 0.0}, CorrectorState{t, y[2], y[3]}, grad_max};
    if (observer) observer(s);
    if (keep_snapshots) traj.snapshots.push_back(std::move(s));
  };
  emit(0.0);
  for (std::size_t step = 1; step <= steps; ++step) {
    t_now = static_cast<double>(step - 1) * dt;
    y = detail::rk4_step(y, dt, rhs);
    detail::project_real(y[1]);
    detail::project_real(y[3]);
    for (const auto& f : y)
      if (!detail::all_finite(f)) {
        std::ostringstream msg;
        msg << "solve_limit_with_corrector: non-finite values at t=" << step * dt;
        throw SolverGuardError(msg.str(), (step - 1) * dt);
      }
    if (step % cfg.save_every == 0 || step == steps) emit(static_cast<double>(step) * dt);
  }
  return traj;
}

/// a exp(i phi / eps), with the resolution guard applied to the product.
inline Field reconstruct(const Field& a, const Field& phi, double eps, double tail_tol = 1e-6) {
  require(eps > 0.0, "reconstruct: eps must be positive");
  require_space(a, Space::physical, "reconstruct");
  require_space(phi, Space::physical, "reconstruct");
  require(a.grid == phi.grid, "reconstruct: a and phi must share a grid");
  Field out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::polar(1.0, phi[i].real() / eps);
  const double tail = tail_fraction(out);
  if (!(tail <= tail_tol)) {
    std::ostringstream msg;
    msg << "reconstruct: phase oscillation unresolved: tail fraction " << tail << " > " << tail_tol;
    throw SolverGuardError(msg.str(), 0.0);
  }
  return out;
}

}  // namespace scnls
