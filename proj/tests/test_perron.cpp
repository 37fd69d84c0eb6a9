#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "growthbound/perron.hpp"
#include "support/generators.hpp"

using namespace growthbound;

namespace {

// Dense Jacobi iteration for the n x n lattice of the unit square, boundary ring fixed at F.
std::vector<double> dense_jacobi(const std::vector<double>& F, int n) {
  std::vector<double> u = F, next = F;
  for (int sweep = 0; sweep < 200000; ++sweep) {
    double change = 0.0;
    for (int j = 1; j < n - 1; ++j) {
      for (int i = 1; i < n - 1; ++i) {
        const int c = i + n * j;
        const double m = 0.25 * (u[c - 1] + u[c + 1] + u[c - n] + u[c + n]);
        next[c] = std::min(F[c], m);
        change = std::max(change, std::abs(next[c] - u[c]));
      }
    }
    u.swap(next);
    if (change == 0.0) break;
  }
  return u;
}

Region unit_square() { return Region::box({0, 0, 0}, {1, 1, 0}, 2); }

}  // namespace

TEST(PerronGrid, Layout) {
  const Grid g = Grid::over(Region::box({0, 0, 0}, {2, 1, 0}, 2), 9);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.25);
  EXPECT_EQ(g.shape()[0], 9);
  EXPECT_EQ(g.shape()[1], 5);
  EXPECT_EQ(g.count(Grid::Node::Interior), 7u * 3u);
  const Point p = g.node(g.index(4, 2));
  EXPECT_NEAR(p[0], 1.0, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
  const Grid d = Grid::over(Region::ball({0, 0, 0}, 1.0, 3), 11);
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.kind(i) == Grid::Node::Interior) EXPECT_LT(norm(d.node(i)), 1.0);
}

TEST(Perron, ConstantObstacle) {
  const Grid g = Grid::over(unit_square(), 17);
  const auto r = largest_subharmonic_minorant(std::vector<double>(g.size(), 3.5), g);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_TRUE(r.converged);
  for (double v : r.M) EXPECT_EQ(v, 3.5);
  EXPECT_DOUBLE_EQ(r.active_fraction, 1.0);
}

TEST(Perron, FiveByFiveToy) {
  const Grid g = Grid::over(unit_square(), 7);  // 5 x 5 interior nodes
  ASSERT_EQ(g.count(Grid::Node::Interior), 25u);
  std::vector<double> F(g.size(), 0.0);
  F[g.index(3, 3)] = 1.0;
  PerronOptions o;
  o.tol = 1e-16;
  const auto r = largest_subharmonic_minorant(F, g, o);
  const auto oracle = dense_jacobi(F, 7);
  for (std::size_t i = 0; i < F.size(); ++i) EXPECT_NEAR(r.M[i], oracle[i], 1e-12);
}

TEST(Perron, RandomObstacleMatchesDenseJacobi) {
  gbtest::Gen gen(3);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 9;
    const Grid g = Grid::over(unit_square(), n);
    std::vector<double> F(g.size());
    for (auto& v : F) v = gen.uniform(-1.0, 2.0);
    PerronOptions o;
    o.tol = 1e-15;
    const auto r = largest_subharmonic_minorant(F, g, o);
    const auto oracle = dense_jacobi(F, n);
    for (std::size_t i = 0; i < F.size(); ++i) EXPECT_NEAR(r.M[i], oracle[i], 1e-12);
  }
}

TEST(Perron, LogKernelCentred) {
  // Bounded radial subharmonic functions on the disk are non-decreasing in r, so
  // with F = -log|x| capped the minorant is pinned by F <= 0 outside the disk.
  const Region disk = Region::ball({0, 0, 0}, 1.0, 2);
  const Grid g = Grid::over(disk, 65);
  const auto F = Majorant::custom("-log|x|", [](const Point& x) { return -std::log(norm(x)); }, 2)
                     .with_cap(-std::log(g.spacing()));
  PerronOptions o;
  o.relaxation = optimal_relaxation(g);
  const auto r = largest_subharmonic_minorant(F, g, o);
  ASSERT_TRUE(r.converged);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_LE(r.M[i], r.F[i]);
    if (g.kind(i) == Grid::Node::Interior) EXPECT_LE(r.M[i], 1e-9);
  }
  EXPECT_TRUE(discrete_subharmonic_check(r.M, g, 10 * r.tol).pass());
}

TEST(Perron, LogKernelHarmonicInside) {
  // Pole outside the disk: F is harmonic on the region, so it is its own minorant
  // up to the O(h^2) consistency error of the five-point mean.
  const Region disk = Region::ball({0, 0, 0}, 1.0, 2);
  const Grid g = Grid::over(disk, 65);
  const Point x0{1.5, 0.2, 0};
  const auto F = Majorant::custom("-log|x-x0|", [&](const Point& x) { return -std::log(norm(x - x0)); }, 2);
  PerronOptions o;
  o.relaxation = optimal_relaxation(g);
  const auto r = largest_subharmonic_minorant(F, g, o);
  ASSERT_TRUE(r.converged);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, r.F[i] - r.M[i]);
  EXPECT_LT(worst, 1e-2);
  EXPECT_GT(r.active_fraction, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.kind(i) == Grid::Node::Interior && r.M[i] >= r.F[i] - r.tol) EXPECT_NEAR(r.M[i], r.F[i], r.tol);
}

TEST(Perron, MonotoneSweeps) {
  const Grid g = Grid::over(unit_square(), 33);
  const auto F = Majorant::composed(DecreasingFn::power_law(1.0, 1.0),
                                    SetDescr::polyline({{0.3, 0.5, 0}, {0.7, 0.5, 0}}, 2))
                     .with_cap(1.0 / g.spacing());
  PerronOptions o;
  o.audit_monotone = true;
  const auto r = largest_subharmonic_minorant(F, g, o);
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(r.monotone);
}

TEST(Perron, ScheduleIndependence) {
  const Grid g = Grid::over(unit_square(), 33);
  const auto F = Majorant::composed(DecreasingFn::log_power(1.0, 4.0),
                                    SetDescr::point_cloud({{0.5, 0.5, 0}, {0.2, 0.7, 0}}, 2))
                     .with_cap(std::log(4.0 / g.spacing()));
  PerronOptions rb, jac, sor;
  jac.schedule = Schedule::Jacobi;
  sor.relaxation = optimal_relaxation(g);
  rb.tol = jac.tol = sor.tol = 1e-12;
  const auto a = largest_subharmonic_minorant(F, g, rb);
  const auto b = largest_subharmonic_minorant(F, g, jac);
  const auto c = largest_subharmonic_minorant(F, g, sor);
  ASSERT_TRUE(a.converged && b.converged && c.converged);
  EXPECT_LT(c.iterations, a.iterations);
  // Residuals bound the distance to the fixed point by about residual / (1 - rate).
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(a.M[i], b.M[i], 1e-8);
    EXPECT_NEAR(a.M[i], c.M[i], 1e-8);
  }
}

TEST(Perron, NoConvergenceFlag) {
  const Grid g = Grid::over(unit_square(), 33);
  std::vector<double> G(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point d = g.node(i) - Point{0.5, 0.5, 0};
    G[i] = 1.0 - dot(d, d);
  }
  PerronOptions o;
  o.max_iters = 2;
  const auto r = largest_subharmonic_minorant(G, g, o);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 2);
}

TEST(SubharmonicCheck, Examples) {
  const Grid g = Grid::over(Region::box({-1, -1, -1}, {1, 1, 1}, 3), 9);
  std::vector<double> affine(g.size()), bowl(g.size()), cap(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.node(i);
    affine[i] = 0.5 + 2 * x[0] - x[1] + 3 * x[2];
    bowl[i] = dot(x, x);
    cap[i] = -dot(x, x);
  }
  EXPECT_TRUE(discrete_subharmonic_check(affine, g, 1e-12).pass());
  EXPECT_TRUE(discrete_subharmonic_check(bowl, g, 0.0).pass());
  const auto bad = discrete_subharmonic_check(cap, g, 0.0);
  EXPECT_EQ(bad.violations.size(), static_cast<std::size_t>(bad.checked));
  EXPECT_GT(bad.checked, 0);
}

TEST(PerronVsBound, Margins) {
  const Grid g = Grid::over(unit_square(), 33);
  const auto F = Majorant::composed(DecreasingFn::power_law(1.0, 1.0), SetDescr::point_cloud({{0.5, 0.5, 0}}, 2))
                     .with_cap(1.0 / g.spacing());
  const auto r = largest_subharmonic_minorant(F, g);
  const auto inf = perron_vs_bound(r, g, [](const Point&) { return kInfinity; });
  EXPECT_EQ(inf.violations, 0);
  EXPECT_EQ(inf.min_margin, kInfinity);
  const auto tight = perron_vs_bound(r, g, [&](const Point& x) { return F.capped(x); });
  EXPECT_EQ(tight.violations, 0);
  EXPECT_GE(tight.min_margin, 0.0);
  const auto corrupt = perron_vs_bound(r, g, [&](const Point& x) { return F.capped(x) / 10; });
  EXPECT_GT(corrupt.violations, 0);
  EXPECT_FALSE(corrupt.allowance_formula.empty());
}

TEST(PerronIo, FieldRoundTrip) {
  const Grid g = Grid::over(Region::box({0, 0, 0}, {1, 1, 1}, 3), 7);
  std::vector<double> F(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) F[i] = 1.0 / (1e-3 + norm(g.node(i)));
  const auto r = largest_subharmonic_minorant(F, g);
  const auto path = (std::filesystem::temp_directory_path() / "gb_field.csv").string();
  write_field_csv(r, g, path);
  const auto back = read_obstacle_csv(g, path);
  for (std::size_t i = 0; i < F.size(); ++i) EXPECT_EQ(back[i], F[i]);
  std::remove(path.c_str());
}
