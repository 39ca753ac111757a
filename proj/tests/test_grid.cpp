#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "scnls/grid.hpp"

using namespace scnls;

namespace {

constexpr double pi = std::numbers::pi;

Field random_field(const GridPtr& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Field f(g);
  for (auto& v : f.values) v = cplx(d(rng), d(rng));
  return f;
}

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(MakeGrid, UnitWavenumbersOnPiBox) {
  auto g = make_grid(1, pi, 8);
  EXPECT_DOUBLE_EQ(g->spacing(), pi / 4);
  const std::vector<double> expect{0, 1, 2, 3, -4, -3, -2, -1};
  auto k = g->axis_wavenumbers();
  ASSERT_EQ(k.size(), expect.size());
  for (std::size_t i = 0; i < k.size(); ++i) EXPECT_NEAR(k[i], expect[i], 1e-15);
}

TEST(MakeGrid, HalfWavenumberSpacing) {
  auto g = make_grid(1, 2 * pi, 16);
  auto k = g->axis_wavenumbers();
  EXPECT_NEAR(k[1] - k[0], 0.5, 1e-15);
  EXPECT_NEAR(g->spacing() * g->points_per_axis(), 2 * g->half_width(), 1e-15);
}

TEST(MakeGrid, ThreeDimensionalCount) {
  auto g = make_grid(3, 8.0, 64);
  EXPECT_EQ(g->size(), 64u * 64u * 64u);
  EXPECT_DOUBLE_EQ(g->spacing(), 0.25);
}

TEST(MakeGrid, RejectsBadInput) {
  EXPECT_THROW(make_grid(1, 1.0, 12), ValidationError);
  EXPECT_THROW(make_grid(1, 1.0, 4), ValidationError);
  EXPECT_THROW(make_grid(1, 0.0, 16), ValidationError);
  EXPECT_THROW(make_grid(1, -2.0, 16), ValidationError);
  EXPECT_THROW(make_grid(0, 1.0, 16), ValidationError);
  EXPECT_THROW(make_grid(4, 1.0, 16), ValidationError);
  EXPECT_THROW(make_grid(3, 1.0, 512, std::size_t{1} << 24), ValidationError);
}

TEST(Transform, ConstantHasOnlyZeroMode) {
  auto g = make_grid(1, 3.0, 32);
  Field f(g);
  for (auto& v : f.values) v = cplx(2.0, -1.0);
  const Field fh = transform(f);
  EXPECT_NEAR(std::abs(fh[0] - cplx(2.0, -1.0) * 6.0), 0.0, 1e-12);
  for (std::size_t i = 1; i < fh.size(); ++i) EXPECT_LT(std::abs(fh[i]), 1e-12);
}

TEST(Transform, PlaneWaveIsSingleMode) {
  auto g = make_grid(1, pi, 32);
  Field w(g);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::polar(1.0, 3.0 * g->coordinate(i));
  const Field wh = transform(w);
  for (std::size_t i = 0; i < wh.size(); ++i) {
    if (i == 3)
      EXPECT_NEAR(std::abs(wh[i] - cplx(2 * pi)), 0.0, 1e-12);
    else
      EXPECT_LT(std::abs(wh[i]), 1e-12);
  }
}

TEST(Transform, RoundTripRandom) {
  for (int dim = 1; dim <= 3; ++dim) {
    auto g = make_grid(dim, 2.5, dim == 3 ? 16 : 64);
    const Field f = random_field(g, 7 + dim);
    const Field back = inverse_transform(transform(f));
    EXPECT_LT(l2_quadrature(back - f) / l2_quadrature(f), 1e-12) << "dim " << dim;
  }
}

TEST(Transform, WrongSpaceRejected) {
  auto g = make_grid(1, 1.0, 16);
  Field f(g);
  EXPECT_THROW(inverse_transform(f), ValidationError);
  EXPECT_THROW(transform(transform(f)), ValidationError);
}

TEST(Calculus, GradientOfConstantVanishes) {
  auto g = make_grid(2, 3.0, 32);
  Field f(g);
  for (auto& v : f.values) v = 4.0;
  for (const auto& d : gradient(f)) EXPECT_LT(linf_norm(d), 1e-12);
}

TEST(Calculus, GradientOfSine) {
  auto g = make_grid(1, pi, 32);
  const Field f = sample(g, [](auto x) { return std::sin(x[0]); });
  const Field c = sample(g, [](auto x) { return std::cos(x[0]); });
  EXPECT_LT(max_abs_diff(gradient(f)[0], c), 1e-12);
}

TEST(Calculus, LaplacianOfPlaneWave) {
  auto g = make_grid(1, pi, 32);
  Field w(g), expect(g);
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::polar(1.0, 5.0 * g->coordinate(i));
    expect[i] = -25.0 * w[i];
  }
  EXPECT_LT(max_abs_diff(laplacian(w), expect), 1e-11);
}

TEST(Calculus, NyquistZeroedInGradientKeptInLaplacian) {
  auto g = make_grid(1, pi, 16);
  Field w(g);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::cos(8.0 * g->coordinate(i));
  EXPECT_LT(linf_norm(gradient(w)[0]), 1e-12);
  EXPECT_NEAR(linf_norm(laplacian(w)), 64.0, 1e-10);
}

TEST(Calculus, FourthOrderFiniteDifferenceConsistency) {
  auto fd_error = [](int n) {
    auto g = make_grid(1, pi, n);
    const Field f = sample(g, [](auto x) { return std::exp(std::sin(x[0])); });
    const Field df = gradient(f)[0];
    const Field lf = laplacian(f);
    const double h = g->spacing();
    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i < n; ++i) {
      auto at = [&](int k) { return f[static_cast<std::size_t>((i + k + n) % n)].real(); };
      const double d1 = (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
      const double d2 = (-at(2) + 16 * at(1) - 30 * at(0) + 16 * at(-1) - at(-2)) / (12 * h * h);
      e1 = std::max(e1, std::abs(d1 - df[i].real()));
      e2 = std::max(e2, std::abs(d2 - lf[i].real()));
    }
    return std::pair{e1, e2};
  };
  const auto [a1, a2] = fd_error(64);
  const auto [b1, b2] = fd_error(128);
  EXPECT_NEAR(a1 / b1, 16.0, 16.0 * 0.25);
  EXPECT_NEAR(a2 / b2, 16.0, 16.0 * 0.25);
}

TEST(Norm, ConstantHasZeroHomogeneousNorm) {
  auto g = make_grid(1, 4.0, 32);
  Field f(g);
  for (auto& v : f.values) v = 3.0;
  EXPECT_LT(norm(f, SobolevIndex::hdot(1.5)), 1e-12);
  EXPECT_NEAR(norm(f), 3.0 * std::sqrt(8.0), 1e-12);
}

TEST(Norm, PlaneWaveScaledNorm) {
  auto g = make_grid(1, pi, 32);
  Field w(g);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::polar(1.0, 3.0 * g->coordinate(i));
  const double eps = 0.25, s = 1.5;
  const double expect = std::pow(1 + eps * eps * 9.0, s / 2) * std::sqrt(2 * pi);
  EXPECT_NEAR(norm(w, SobolevIndex::h_eps(s, eps)), expect, 1e-12 * expect);
  EXPECT_NEAR(norm(w, SobolevIndex::hdot(1.0)), 3.0 * std::sqrt(2 * pi), 1e-11);
}

TEST(Norm, GaussianL2) {
  auto g = make_grid(1, 12.0, 256);
  const Field a = make_gaussian(g, 1.0, 1.0);
  EXPECT_NEAR(norm(a), std::pow(pi / 2, 0.25), 1e-8);
  const Field b = make_gaussian(g, 2.0, 1.0);
  EXPECT_NEAR(norm(b), 2.0 * norm(a), 1e-12);
}

TEST(Norm, NegativeIndexRejected) {
  auto g = make_grid(1, 1.0, 16);
  Field f(g);
  EXPECT_THROW(norm(f, SobolevIndex::h(-1.0)), ValidationError);
  EXPECT_THROW(norm(f, SobolevIndex::h_eps(1.0, 0.0)), ValidationError);
  EXPECT_THROW(norm(f, SobolevIndex::h_eps(1.0, 1.5)), ValidationError);
}

TEST(Gaussian, BoundaryDecay) {
  auto big = make_grid(1, 12.0, 128);
  const Field a = make_gaussian(big, 1.0, 1.0);
  EXPECT_LT(std::abs(a[0]), 1e-60);
  auto small = make_grid(1, 2.0, 64);
  EXPECT_THROW(make_gaussian(small, 1.0, 1.0), ValidationError);
}

TEST(Properties, Parseval) {
  for (int dim = 1; dim <= 3; ++dim) {
    auto g = make_grid(dim, 1.7, dim == 3 ? 16 : 32);
    const Field f = random_field(g, 100 + dim);
    const double phys = l2_quadrature(f);
    EXPECT_NEAR(norm(f), phys, 1e-10 * phys);
  }
}

TEST(Properties, NormMonotonicity) {
  auto g = make_grid(1, 6.0, 128);
  const Field f = make_gaussian(g, 1.0, 0.7);
  double prev = 0.0;
  for (double s = 0.0; s <= 3.0; s += 0.25) {
    const double v = norm(f, SobolevIndex::h(s));
    EXPECT_GE(v, prev);
    prev = v;
    for (double eps : {1.0, 0.5, 0.01}) EXPECT_LE(norm(f, SobolevIndex::h_eps(s, eps)), v * (1 + 1e-14));
  }
}

TEST(Properties, TwoGridScalingOracle) {
  for (int dim = 1; dim <= 3; ++dim) {
    const int n = dim == 3 ? 32 : 128;
    const double L = 6.0, s = 0.3;
    auto g = make_grid(dim, L, n);
    const Field f = make_gaussian(g, 1.0, 1.0);
    for (int j : {2, 4}) {
      auto gj = make_grid(dim, L / j, n);
      Field fj(gj);
      const double amp = std::pow(j, dim / 2.0 - s);
      for (std::size_t i = 0; i < f.size(); ++i) fj[i] = amp * f[i];
      for (double m : {0.0, 0.5, 1.0, 2.0}) {
        const double lhs = norm(fj, SobolevIndex::hdot(m));
        const double rhs = std::pow(j, m - s) * norm(f, SobolevIndex::hdot(m));
        EXPECT_NEAR(lhs, rhs, 1e-8 * rhs) << "dim " << dim << " j " << j << " m " << m;
      }
    }
  }
}

TEST(Dealias, TailFraction) {
  auto g = make_grid(1, pi, 32);
  Field low(g), high(g);
  for (std::size_t i = 0; i < low.size(); ++i) {
    low[i] = std::polar(1.0, 4.0 * g->coordinate(i));
    high[i] = std::polar(1.0, 14.0 * g->coordinate(i));
  }
  EXPECT_LT(tail_fraction(low), 1e-20);
  EXPECT_NEAR(tail_fraction(high), 1.0, 1e-12);
  Field h = transform(high);
  dealias(h);
  EXPECT_LT(norm(h), 1e-12);
  EXPECT_EQ(tail_fraction(Field(g)), 0.0);
}
