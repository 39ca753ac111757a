#include <gtest/gtest.h>

#include <cmath>

#include "scnls/experiments.hpp"
#include "scnls/wkb.hpp"

using namespace scnls;

namespace {

GridPtr line(int n = 128, double L = 8.0) { return make_grid(1, L, n); }

Field real_part_of(const Field& f) {
  Field out = f;
  for (auto& v : out.values) v = v.real();
  return out;
}

double max_abs(const Field& f) { return linf_norm(f); }

Field rho_of(const Field& a) {
  Field r(a.grid);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::norm(a[i]);
  return r;
}

Field mul(const Field& a, const Field& b) {
  Field out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

GrenierRunConfig cfg(double dt, double T, int every = 1) {
  return GrenierRunConfig{.dt = dt, .T = T, .save_every = every};
}

}  // namespace

TEST(GrenierRhs, InitialPhaseRate) {
  auto g = line();
  const Field a0 = make_gaussian(g, 1.0, 1.0);
  const auto r = grenier_rhs(GrenierState{0.0, a0, Field(g), 0.1});
  EXPECT_LT(max_abs(r.dphi + rho_of(a0)), 1e-12);
}

TEST(GrenierRhs, VacuumAndFlatAmplitude) {
  auto g = line(32);
  const auto v = grenier_rhs(GrenierState{0.0, Field(g), Field(g), 0.3});
  EXPECT_EQ(max_abs(v.da), 0.0);
  EXPECT_EQ(max_abs(v.dphi), 0.0);

  Field c(g);
  for (auto& x : c.values) x = 0.7;
  const auto r = grenier_rhs(GrenierState{0.0, c, Field(g), 0.0});
  EXPECT_LT(max_abs(r.da), 1e-14);
  for (const auto& x : r.dphi.values) EXPECT_NEAR(x.real(), -0.49, 1e-14);
}

TEST(GrenierRhs, SingularityGuard) {
  auto g = line();
  const Field a0 = make_gaussian(g, 1.0, 1.0);
  const Field phi = make_gaussian(g, 5.0, 1.0);
  EXPECT_THROW(grenier_rhs(GrenierState{0.0, a0, phi, 0.0}, true, 1.0), SolverGuardError);
}

TEST(CorrectorRhs, InitialRates) {
  auto g = line();
  const Field a0 = make_gaussian(g, 1.0, 1.0);
  const GrenierState bg{0.0, a0, Field(g), 0.0};
  const auto r = corrector_rhs(bg, CorrectorState{0.0, a0, Field(g)});
  EXPECT_LT(max_abs(r.dphi1 + 2.0 * rho_of(a0)), 1e-12);

  const auto ri = corrector_rhs(bg, CorrectorState{0.0, cplx(0.0, 1.0) * a0, Field(g)});
  EXPECT_LT(max_abs(ri.dphi1), 1e-14);
}

TEST(CorrectorRhs, VacuumBackground) {
  auto g = line();
  const Field phi = make_gaussian(g, 0.5, 1.2);
  const Field a1 = make_gaussian(g, 1.0, 0.8);
  const Field phi1 = make_gaussian(g, 0.3, 1.2);
  const auto r = corrector_rhs(GrenierState{0.0, Field(g), phi, 0.0}, CorrectorState{0.0, a1, phi1}, false);
  const Field gp = gradient(phi)[0];
  const Field expect_da1 = -1.0 * mul(gp, gradient(a1)[0]) - 0.5 * mul(a1, laplacian(phi));
  const Field expect_dphi1 = real_part_of(-1.0 * mul(gp, gradient(phi1)[0]));
  EXPECT_LT(max_abs(r.da1 - expect_da1), 1e-12);
  EXPECT_LT(max_abs(r.dphi1 - expect_dphi1), 1e-12);
}

TEST(CorrectorRhs, RequiresLimitBackgroundAtSameTime) {
  auto g = line(32);
  const Field z(g);
  EXPECT_THROW(corrector_rhs(GrenierState{0.0, z, z, 0.1}, CorrectorState{0.0, z, z}), ValidationError);
  EXPECT_THROW(corrector_rhs(GrenierState{0.1, z, z, 0.0}, CorrectorState{0.2, z, z}), ValidationError);
}

TEST(SolveGrenier, ZeroEpsIgnoresA1) {
  auto g = line();
  const Field a0 = make_gaussian(g, 1.0, 1.0);
  const Field a1 = make_gaussian(g, 2.0, 0.5);
  const auto with = solve_grenier(a0, a1, 0.0, cfg(0.01, 0.1, 5));
  const auto without = solve_grenier(a0, Field(g), 0.0, cfg(0.01, 0.1, 5));
  ASSERT_FALSE(with.warnings.empty());
  EXPECT_TRUE(without.warnings.empty());
  EXPECT_EQ(with.snapshots.back().a.values, without.snapshots.back().a.values);
}

TEST(SolveGrenier, ZeroDataStaysZero) {
  auto g = line(64);
  const auto traj = solve_grenier(Field(g), Field(g), 0.2, cfg(0.01, 0.1, 2));
  for (const auto& s : traj.snapshots) {
    EXPECT_EQ(max_abs(s.a), 0.0);
    EXPECT_EQ(max_abs(s.phi), 0.0);
  }
}

TEST(SolveGrenier, PhaseStaysReal) {
  auto g = line();
  const Field a0 = make_gaussian(g, 1.0, 1.0);
  const auto traj = solve_grenier(a0, a0, 0.25, cfg(1e-3, 0.1, 20));
  for (const auto& s : traj.snapshots)
    for (const auto& v : s.phi.values) EXPECT_LE(std::abs(v.imag()), 1e-12);
  EXPECT_EQ(traj.snapshots.front().t, 0.0);
  EXPECT_EQ(max_abs(traj.snapshots.front().phi), 0.0);
}

TEST(SolveGrenier, FourthOrderSelfConvergence) {
  auto g = line();
  const Field a0 = make_gaussian(g, 1.0, 1.0);
  const double T = 0.25;
  auto final_state = [&](double dt) {
    const auto t = solve_grenier(a0, Field(g), 0.0, cfg(dt, T, 1 << 30));
    return t.snapshots.back();
  };
  const auto ref = final_state(T / 400);
  auto err = [&](double dt) {
    const auto s = final_state(dt);
    return norm(s.a - ref.a) + norm(s.phi - ref.phi);
  };
  const double e1 = err(T / 10), e2 = err(T / 20);
  EXPECT_NEAR(e1 / e2, 16.0, 16.0 * 0.3);
}

TEST(SolveGrenier, SingularityGuardAborts) {
  auto g = line();
  const Field a0 = make_gaussian(g, 1.0, 1.0);
  GrenierRunConfig c = cfg(0.01, 0.2, 1);
  c.sing_tol = 1e-3;
  EXPECT_THROW(solve_grenier(a0, Field(g), 0.0, c), SolverGuardError);
}

TEST(SolveGrenier, DecayCheck) {
  auto g = make_grid(1, 2.0, 64);
  Field c(g);
  for (auto& v : c.values) v = 1.0;
  EXPECT_THROW(solve_grenier(c, Field(g), 0.1, cfg(0.01, 0.1)), ValidationError);
}

TEST(SolveLimit, ZeroA1GivesVanishingPhaseCorrector) {
  auto g = line();
  const Field a0 = make_gaussian(g, 1.0, 1.0);
  const auto traj = solve_limit_with_corrector(a0, Field(g), cfg(1e-3, 0.25, 50));
  for (const auto& s : traj.snapshots) {
    EXPECT_LE(max_abs(s.corrector.phi1), 1e-8);
    for (const auto& v : s.corrector.a1.values) EXPECT_LE(std::abs(v.real()), 1e-8);
  }
  EXPECT_GT(max_abs(traj.snapshots.back().corrector.a1), 1e-3);
}

TEST(SolveLimit, CorrectorPhaseInitialSlope) {
  auto g = line();
  const Field a0 = make_gaussian(g, 1.0, 1.0);
  const double t = 1e-3;
  const auto traj = solve_limit_with_corrector(a0, a0, cfg(t / 10, t, 10));
  const Field& phi1 = traj.snapshots.back().corrector.phi1;
  EXPECT_LT(max_abs((1.0 / t) * phi1 + 2.0 * rho_of(a0)), 1e-4);
}

TEST(SolveLimit, VacuumBackgroundKeepsA1) {
  auto g = line();
  const Field a1 = make_gaussian(g, 1.0, 1.0);
  const auto traj = solve_limit_with_corrector(Field(g), a1, cfg(0.01, 0.1, 5));
  const auto& last = traj.snapshots.back();
  EXPECT_LT(max_abs(last.corrector.a1 - a1), 1e-14);
  EXPECT_EQ(max_abs(last.corrector.phi1), 0.0);
}

TEST(SolveLimit, MassOfLimitSystemConserved) {
  auto g = line();
  const Field a0 = make_gaussian(g, 1.0, 1.0);
  const auto traj = solve_limit_with_corrector(a0, a0, cfg(1e-3, 0.25, 25));
  const double m0 = norm(a0) * norm(a0);
  for (const auto& s : traj.snapshots) {
    const double m = norm(s.background.a) * norm(s.background.a);
    EXPECT_LT(std::abs(m - m0) / m0, 1e-8);
  }
}

TEST(Reconstruct, Examples) {
  auto g = line();
  const Field a = make_gaussian(g, 1.0, 1.0);
  EXPECT_EQ(reconstruct(a, Field(g), 0.1).values, a.values);

  const Field phi = 0.3 * make_gaussian(g, 1.0, 1.2);
  const Field u = reconstruct(a, phi, 0.25);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(std::abs(u[i]), std::abs(a[i]), 1e-15);

  Field c(g);
  for (auto& v : c.values) v = 0.4;
  const Field uc = reconstruct(a, c, 0.2);
  for (std::size_t i = 0; i < uc.size(); ++i) EXPECT_LT(std::abs(uc[i] - a[i] * std::polar(1.0, 2.0)), 1e-15);

  EXPECT_THROW(reconstruct(a, phi, 0.0), ValidationError);
  const Field steep = 5.0 * make_gaussian(g, 1.0, 1.2);
  EXPECT_THROW(reconstruct(a, steep, 1e-3), SolverGuardError);
}

TEST(SmallTime, FlatAmplitudeOnTorus) {
  auto g = make_grid(1, 4.0, 32);
  Field c(g);
  for (auto& v : c.values) v = 0.8;
  const auto rep = small_time_study(c, 0.25, 4, {0.0, 1.0}, 1e-3, false);
  ASSERT_FALSE(rep.rows.empty());
  for (const auto& r : rep.rows) EXPECT_LT(r.value, 1e-13) << r.quantity;
}
