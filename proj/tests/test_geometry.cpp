#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "growthbound/geometry.hpp"
#include "support/generators.hpp"

using namespace growthbound;

namespace {

constexpr double kPi = std::numbers::pi;

SetDescr unit_segment() { return SetDescr::polyline({{0, 0, 0}, {1, 0, 0}}, 2); }

SetDescr random_set(gbtest::Gen& gen, int k) {
  auto pt = [&] {
    Point p{};
    for (int i = 0; i < k; ++i) p[i] = gen.uniform(-1.0, 1.0);
    return p;
  };
  switch (gen.integer(0, 3)) {
    case 0: {
      std::vector<Point> pts;
      const int n = gen.integer(1, 80);
      for (int i = 0; i < n; ++i) pts.push_back(pt());
      return SetDescr::point_cloud(pts, k);
    }
    case 1: {
      std::vector<Point> pts;
      const int n = gen.integer(2, 70);
      for (int i = 0; i < n; ++i) pts.push_back(pt());
      return SetDescr::polyline(pts, k);
    }
    case 2: {
      const int corners = k == 2 && gen.coin() ? 4 : 2;
      return SetDescr::cantor_dust(corners, gen.uniform(0.2, 0.45), gen.integer(1, 7), pt(), {2, 2, 2}, k);
    }
    default:
      return SetDescr::union_of({SetDescr::point_cloud({pt()}, k), SetDescr::polyline({pt(), pt()}, k)});
  }
}

}  // namespace

TEST(DistToSet, Examples) {
  EXPECT_DOUBLE_EQ(SetDescr::point_cloud({{3, 4, 0}}, 2).dist({0, 0, 0}), 5.0);
  EXPECT_DOUBLE_EQ(SetDescr::polyline({{-1, 0, 0}, {1, 0, 0}}, 2).dist({0, 1, 0}), 1.0);
  // Nearest point is the endpoint (1,0): |(1,3)| = sqrt(10).
  EXPECT_DOUBLE_EQ(unit_segment().dist({2, 3, 0}), std::sqrt(10.0));
}

TEST(DistToSet, SegmentAgainstDenseSampling) {
  const auto seg = unit_segment();
  gbtest::Gen gen(11);
  for (int probe = 0; probe < 6; ++probe) {
    const Point x = probe == 0 ? Point{2, 3, 0} : Point{gen.uniform(-2, 3), gen.uniform(-2, 2), 0};
    double best = kInfinity;
    const int n = 1'000'000;
    for (int i = 0; i <= n; ++i) best = std::min(best, distance(x, Point{static_cast<double>(i) / n, 0, 0}));
    EXPECT_NEAR(seg.dist(x), best, 1e-6);
  }
}

TEST(DistToSet, LargePolylineMatchesLinearScan) {
  gbtest::Gen gen(12);
  std::vector<Point> verts;
  for (int i = 0; i < 500; ++i) verts.push_back({gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1)});
  const auto pl = SetDescr::polyline(verts, 3);
  for (int probe = 0; probe < 200; ++probe) {
    const Point x{gen.uniform(-2, 2), gen.uniform(-2, 2), gen.uniform(-2, 2)};
    double best = kInfinity;
    for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
      const Point ab = verts[i + 1] - verts[i];
      const double t = std::clamp(dot(x - verts[i], ab) / dot(ab, ab), 0.0, 1.0);
      best = std::min(best, distance(x, verts[i] + t * ab));
    }
    EXPECT_NEAR(pl.dist(x), best, 1e-12);
  }
}

TEST(DistToSet, CantorMatchesLeafScan) {
  const auto dust = SetDescr::cantor_dust(4, 0.3, 5, {0, 0, 0}, {1, 1, 0}, 2);
  // Leaves reconstructed independently from the base-ratio expansion.
  std::vector<std::pair<Point, Point>> leaves{{{0, 0, 0}, {1, 1, 0}}};
  for (int lvl = 0; lvl < 5; ++lvl) {
    std::vector<std::pair<Point, Point>> next;
    for (const auto& [lo, hi] : leaves) {
      const double w = 0.3 * (hi[0] - lo[0]);
      for (int m = 0; m < 4; ++m) {
        Point l = lo;
        l[0] = (m & 1) ? hi[0] - w : lo[0];
        l[1] = (m & 2) ? hi[1] - w : lo[1];
        next.push_back({l, l + Point{w, w, 0}});
      }
    }
    leaves = next;
  }
  gbtest::Gen gen(13);
  for (int probe = 0; probe < 300; ++probe) {
    const Point x{gen.uniform(-0.5, 1.5), gen.uniform(-0.5, 1.5), 0};
    double best = kInfinity;
    for (const auto& [lo, hi] : leaves) {
      const double dx = std::max({lo[0] - x[0], 0.0, x[0] - hi[0]});
      const double dy = std::max({lo[1] - x[1], 0.0, x[1] - hi[1]});
      best = std::min(best, std::hypot(dx, dy));
    }
    EXPECT_NEAR(dust.dist(x), best, 1e-12);
  }
}

TEST(DistToSet, LipGraphRotationValidated) {
  auto d = linear_graph(-1, 1, 0.5, 0.01, 2.0);
  d.rotation[0][0] = 1.0 + 1e-9;
  EXPECT_THROW(SetDescr::lip_graph(d, 2), ArgumentError);
  d.rotation = plane_rotation(0.7);
  const auto g = SetDescr::lip_graph(d, 2);
  // World point of chart sample s = 0.4 lies on the set.
  const Point w = apply_transpose(d.rotation, Point{0.4, 0.2, 0});
  EXPECT_NEAR(g.dist(w), 0.0, 1e-12);
}

TEST(BoundaryDist, Examples) {
  EXPECT_DOUBLE_EQ(Region::ball({0, 0, 0}, 1.0, 2).boundary_dist({0, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(Region::box({0, 0, 0}, {1, 1, 0}, 2).boundary_dist({0.2, 0.5, 0}), 0.2);
  EXPECT_THROW(Region::ball({0, 0, 0}, 1.0, 2).boundary_dist({2, 0, 0}), OutsideRegion);
  EXPECT_THROW(Region::box({0, 0, 0}, {1, 1, 0}, 2).boundary_dist({1, 0.5, 0}), OutsideRegion);
}

TEST(BoundaryDist, OverlappingDisksAgainstBoundaryScan) {
  const auto a = Region::ball({0, 0, 0}, 1.0, 2);
  const auto b = Region::ball({1.2, 0, 0}, 0.8, 2);
  const auto u = Region::union_of({a, b});
  std::vector<Point> boundary;
  const int n = 500'000;
  for (int i = 0; i < n; ++i) {
    const double th = 2 * kPi * i / n;
    const Point pa{std::cos(th), std::sin(th), 0};
    const Point pb{1.2 + 0.8 * std::cos(th), 0.8 * std::sin(th), 0};
    if (!b.contains(pa)) boundary.push_back(pa);
    if (!a.contains(pb)) boundary.push_back(pb);
  }
  gbtest::Gen gen(14);
  for (const Point x : {Point{0.9, 0.0, 0}, Point{1.0, 0.3, 0}, Point{-0.5, 0.1, 0}, Point{1.6, -0.2, 0}}) {
    double best = kInfinity;
    for (const auto& p : boundary) best = std::min(best, distance(x, p));
    EXPECT_NEAR(u.boundary_dist(x), best, 1e-3) << x[0] << "," << x[1];
  }
  const double d = 1.2, r1 = 1.0, r2 = 0.8;
  const double lens = r1 * r1 * std::acos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1)) +
                      r2 * r2 * std::acos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2)) -
                      0.5 * std::sqrt((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2));
  EXPECT_NEAR(u.volume(), kPi * (r1 * r1 + r2 * r2) - lens, 0.01);
}

TEST(BoundaryDist, BoxAndBall3D) {
  const auto box = Region::box({0, 0, 0}, {1, 2, 3}, 3);
  EXPECT_NEAR(box.boundary_dist({0.5, 1.9, 1.0}), 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(box.volume(), 6.0);
  const auto ball = Region::ball({0, 0, 0}, 2.0, 3);
  EXPECT_DOUBLE_EQ(ball.boundary_dist({1, 0, 0}), 1.0);
  EXPECT_NEAR(ball.volume(), 4.0 / 3.0 * kPi * 8.0, 1e-12);
}

TEST(TubeMeasure, SegmentTubeArea) {
  const auto m = tube_measure(unit_segment(), 0.1, {0.5, 0, 0}, 2.0, 1'000'000, 7);
  const double exact = 2 * 0.1 * 1.0 + kPi * 0.01;
  EXPECT_NEAR(m.value, exact, 0.02 * exact);
  EXPECT_LT(std::abs(m.value - exact), 4 * m.std_error);
  EXPECT_EQ(m.n, 1'000'000);
  EXPECT_EQ(m.seed, 7u);
}

TEST(TubeMeasure, SinglePointDisk) {
  const auto pt = SetDescr::point_cloud({{0.3, 0.3, 0}}, 2);
  const auto m = tube_measure(pt, 0.2, {0, 0, 0}, 1.0, 200'000, 8);
  EXPECT_LT(std::abs(m.value - kPi * 0.04), 4 * m.std_error);
}

TEST(TubeMeasure, WholeBall) {
  const auto pt = SetDescr::point_cloud({{0.1, 0, 0}}, 2);
  const auto m = tube_measure(pt, 5.0, {0, 0, 0}, 1.0, 100'000, 9);
  EXPECT_LT(std::abs(m.value - kPi), 4 * m.std_error + 1e-12);
  const auto m3 = tube_measure(SetDescr::point_cloud({{0, 0, 0.2}}, 3), 5.0, {0, 0, 0}, 0.5, 100'000, 9);
  EXPECT_LT(std::abs(m3.value - 4.0 / 3.0 * kPi * 0.125), 4 * m3.std_error + 1e-12);
}

TEST(TubeMeasure, DeterministicAndSharded) {
  const auto seg = unit_segment();
  const auto a = tube_measure(seg, 0.05, {0.5, 0, 0}, 0.5, 20'000, 3, 4);
  const auto b = tube_measure(seg, 0.05, {0.5, 0, 0}, 0.5, 20'000, 3, 4);
  EXPECT_EQ(a.value, b.value);
  const auto c = tube_measure(seg, 0.05, {0.5, 0, 0}, 0.5, 20'000, 3, 1);
  EXPECT_LT(std::abs(a.value - c.value), 5 * (a.std_error + c.std_error));
  EXPECT_THROW(tube_measure(seg, 0.0, {0, 0, 0}, 1.0, 1000, 1), ArgumentError);
  EXPECT_THROW(tube_measure(seg, 0.1, {0, 0, 0}, 1.0, 999, 1), ArgumentError);
}

TEST(Admissibility, SegmentStableAcrossSigma) {
  const auto seg = unit_segment();
  ProbeSchedule s;
  s.radii = {0.1, 0.3};
  s.centers = {{0.5, 0, 0}};
  s.samples_per_probe = 200'000;
  std::vector<double> ratios;
  for (double sigma : {1e-3, 1e-2, 1e-1}) {
    s.sigmas = {sigma};
    ratios.push_back(admissibility_constant(seg, 1.0, s, 5).C_hat);
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  EXPECT_LT(*hi / *lo, 1.2);
  // Inside a ball of radius R around an interior point the tube has area 4 sigma R.
  EXPECT_NEAR(ratios.front(), 4.0, 0.2);
}

TEST(Admissibility, SinglePointBound) {
  const auto pt = SetDescr::point_cloud({{0, 0, 0}}, 2);
  const auto s = default_probe_schedule(pt);
  const auto est = admissibility_constant(pt, 1.0, s, 6);
  double bound = 0.0;
  for (double sg : s.sigmas)
    for (double r : s.radii) bound = std::max(bound, kPi * std::min(sg, r) * std::min(sg, r) / (sg * r));
  EXPECT_LE(est.C_hat, bound * 1.05);
  EXPECT_EQ(est.q_star, 1.0);
  EXPECT_EQ(est.probes, static_cast<long>(s.sigmas.size() * s.radii.size() * s.centers.size()));
}

TEST(Admissibility, ContainmentBoundAtSigmaEqualR) {
  const auto pt = SetDescr::point_cloud({{0, 0, 0}}, 2);
  ProbeSchedule s;
  s.sigmas = {2.0};
  s.radii = {0.5};
  s.centers = {{0, 0, 0}};
  // sigma beyond R: the ball is the whole tube, ratio <= S1 R^2 / (sigma R).
  const auto est = admissibility_constant(pt, 1.0, s, 1);
  EXPECT_LE(est.C_hat, kPi * 0.25 / (2.0 * 0.5) * 1.03);
  EXPECT_THROW(admissibility_constant(pt, 2.0, s, 1), ArgumentError);
  EXPECT_EQ(admissibility_given(3.0, 0.5, 2).q_star, 1.5);
  EXPECT_EQ(admissibility_given(0.5, 0.5, 2).C1(), 1.0);
}

TEST(Covering, Examples) {
  EXPECT_EQ(covering_number(SetDescr::point_cloud({{0, 0, 0}, {10, 0, 0}}, 2), 1.0), 2);
  const long n = covering_number(unit_segment(), 0.25);
  EXPECT_GE(n, 2);
  EXPECT_LE(n, 4);
  const auto cantor = SetDescr::cantor_dust(2, 1.0 / 3.0, 8, {0, 0, 0}, {1, 0, 0}, 2);
  const long c = covering_number(cantor, std::pow(3.0, -5));
  EXPECT_GE(c, 16);
  EXPECT_LE(c, 64);
}

TEST(Assouad, Examples) {
  const auto cantor = SetDescr::cantor_dust(2, 1.0 / 3.0, 10, {0, 0, 0}, {1, 0, 0}, 1);
  std::vector<std::pair<double, double>> pairs;
  for (int m = 3; m <= 6; ++m) pairs.emplace_back(std::pow(3.0, -2), std::pow(3.0, -2 - m));
  EXPECT_NEAR(assouad_estimate(cantor, pairs), std::log(2.0) / std::log(3.0), 0.1);

  const std::vector<std::pair<double, double>> seg_pairs{{0.5, 0.05}, {0.5, 0.005}, {0.5, 0.0025}, {0.5, 5e-4}};
  EXPECT_NEAR(assouad_estimate(unit_segment(), seg_pairs), 1.0, 0.05);

  const auto finite = SetDescr::point_cloud({{0, 0, 0}, {0.3, 0, 0}, {0, 0.4, 0}, {0.7, 0.7, 0}}, 2);
  const std::vector<std::pair<double, double>> coarse{{1.0, 0.1}, {1.0, 0.01}, {1.0, 0.001}};
  EXPECT_LE(assouad_estimate(finite, coarse), 0.2);

  EXPECT_THROW(assouad_estimate(finite, {{1.0, 0.1}, {1.0, 0.01}}), InsufficientScales);
}

TEST(Charts, FlatSegmentPasses) {
  const auto seg = SetDescr::polyline({{-1, 0, 0}, {1, 0, 0}}, 2);
  const ChartParams p{2.0, 0.1};
  const auto rep = lipschitz_chart_check(seg, p, {{0, 0, 0}, {0.5, 0, 0}});
  EXPECT_TRUE(rep.pass);
  EXPECT_DOUBLE_EQ(rep.max_slope, 0.0);
  // Equality on the upper side above interior points.
  EXPECT_NEAR(rep.worst_upper_slack, 0.0, 1e-12);
}

TEST(Charts, AbsoluteValuePasses) {
  LipGraphData d;
  d.L = 2.0;
  for (int i = -400; i <= 400; ++i) {
    d.s.push_back(i / 400.0);
    d.phi.push_back({std::abs(i / 400.0), 0, 0});
  }
  const auto g = SetDescr::lip_graph(d, 2);
  const auto rep = lipschitz_chart_check(g, {2.0, 0.1}, {{0, 0, 0}, {0.25, 0.25, 0}, {-0.5, 0.5, 0}});
  EXPECT_NEAR(rep.max_slope, 1.0, 1e-12);
}

TEST(Charts, SteepSlopeFails) {
  const auto g = SetDescr::lip_graph(linear_graph(-1, 1, 3.0, 0.01, 2.0), 2);
  EXPECT_THROW(lipschitz_chart_check(g, {2.0, 0.1}, {{0, 0, 0}}), ChartViolation);
  const auto rep = chart_report(g, {2.0, 0.1}, {{0, 0, 0}});
  EXPECT_FALSE(rep.pass);
  EXPECT_NE(rep.message.find("anchor"), std::string::npos);
}

TEST(Charts, RotatedPolylineIn3D) {
  const Matrix3 u = plane_rotation(0.4);
  const Point a = apply_transpose(u, Point{-1, 0, 0});
  const Point b = apply_transpose(u, Point{1, 0, 0});
  const auto seg = SetDescr::polyline({a, b}, 3);
  const auto rep = lipschitz_chart_check(seg, {2.0, 0.2}, {Point{0, 0, 0}});
  EXPECT_TRUE(rep.pass);
  EXPECT_GT(rep.sandwich_samples, 200);
}

TEST(Charts, NearbyComponentIsViolation) {
  const auto a = SetDescr::polyline({{-1, 0, 0}, {1, 0, 0}}, 2);
  const auto b = SetDescr::polyline({{-1, 0.05, 0}, {1, 0.05, 0}}, 2);
  EXPECT_THROW(lipschitz_chart_check(SetDescr::union_of({a, b}), {2.0, 0.1}, {{0, 0, 0}}), ChartViolation);
  const auto far = SetDescr::polyline({{-1, 5, 0}, {1, 5, 0}}, 2);
  EXPECT_NO_THROW(lipschitz_chart_check(SetDescr::union_of({a, far}), {2.0, 0.1}, {{0, 0, 0}}));
}

TEST(Charts, ParamsValidated) {
  EXPECT_THROW(validate_chart_params({1.5, 0.1}, 1.0), ChartError);
  EXPECT_THROW(validate_chart_params({2.0, 2.0}, 1.0), ChartError);
  EXPECT_NO_THROW(validate_chart_params({2.0, 1.9}, 1.0));
}

TEST(Charts, DomainBoundaryOnCylinder) {
  const auto seg = SetDescr::polyline({{-1, 0, 0}, {1, 0, 0}}, 2);
  const auto chart = local_chart(seg, {0, 0, 0}, {2.0, 0.1});
  const double r = 0.01, L = 2.0;
  for (const auto& x : chart_domain_boundary(chart, 0.0, r, L, 400)) {
    const Point c = chart.to_chart(x);
    const bool on_side = std::abs(std::abs(c[0]) - r) < 1e-12 && std::abs(c[1]) <= 2.5 * L * r + 1e-12;
    const bool on_cap = std::abs(std::abs(c[1]) - 2.5 * L * r) < 1e-12 && std::abs(c[0]) <= r + 1e-12;
    EXPECT_TRUE(on_side || on_cap);
  }
}

// ---------------------------------------------------------------- properties

TEST(GeometryProperty, DistIsOneLipschitz) {
  gbtest::Gen gen(101);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = gen.integer(2, 3);
    const auto s = random_set(gen, k);
    for (int j = 0; j < 20; ++j) {
      Point x{}, y{};
      for (int i = 0; i < k; ++i) {
        x[i] = gen.uniform(-2, 3);
        y[i] = x[i] + gen.uniform(-0.3, 0.3);
      }
      const double dx = s.dist(x), dy = s.dist(y);
      ASSERT_GE(dx, 0.0);
      ASSERT_LE(std::abs(dx - dy), distance(x, y) * (1 + 1e-12) + 1e-14) << s.describe();
    }
  }
}

TEST(GeometryProperty, TubeMonotoneInSigmaAndRadius) {
  gbtest::Gen gen(102);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_set(gen, 2);
    const Point x{gen.uniform(-1, 1), gen.uniform(-1, 1), 0};
    const double sigma = gen.log_uniform(0.01, 0.2), R = gen.log_uniform(0.1, 1.0);
    const auto base = tube_measure(s, sigma, x, R, 20'000, 1);
    const auto wider = tube_measure(s, sigma * 1.5, x, R, 20'000, 2);
    const auto bigger = tube_measure(s, sigma, x, R * 1.5, 20'000, 3);
    EXPECT_GE(wider.value + 3 * (wider.std_error + base.std_error), base.value);
    EXPECT_GE(bigger.value + 3 * (bigger.std_error + base.std_error), base.value);
  }
}

TEST(GeometryProperty, UnionAdmissibilityIsSubadditive) {
  gbtest::Gen gen(103);
  for (int trial = 0; trial < 4; ++trial) {
    const auto a = random_set(gen, 2);
    const auto b = random_set(gen, 2);
    const auto u = SetDescr::union_of({a, b});
    ProbeSchedule s = default_probe_schedule(u);
    s.samples_per_probe = 4000;
    const auto eu = admissibility_constant(u, 1.0, s, 10);
    const auto ea = admissibility_constant(a, 1.0, s, 11);
    const auto eb = admissibility_constant(b, 1.0, s, 12);
    EXPECT_LE(eu.C_hat, ea.C_hat + eb.C_hat + 4 * eu.worst_ratio_std_error) << u.describe();
  }
}

TEST(GeometryProperty, CoveringMonotoneInRadius) {
  gbtest::Gen gen(104);
  for (int trial = 0; trial < 40; ++trial) {
    const auto s = random_set(gen, gen.integer(2, 3));
    const double sp = std::max(1e-3, s.default_resolution());
    long prev = std::numeric_limits<long>::max();
    for (double r = 1e-2; r < 4.0; r *= 1.7) {
      const long n = covering_number(s, r, sp);
      ASSERT_LE(n, prev) << s.describe() << " r=" << r;
      prev = n;
    }
  }
}

TEST(GeometryProperty, CantorBelowAdmissibilityExponentStaysBounded) {
  // Assouad dimension log2/log3 < p* = 1: the ratio stays bounded over a schedule
  // spanning three decades.
  const auto cantor = SetDescr::cantor_dust(2, 1.0 / 3.0, 9, {0, 0, 0}, {1, 0, 0}, 2);
  ProbeSchedule s;
  for (int i = 0; i < 4; ++i) {
    s.sigmas.push_back(1e-3 * std::pow(10.0, i * 2.0 / 3.0));
    s.radii.push_back(1e-2 * std::pow(10.0, i * 2.0 / 3.0));
  }
  s.centers = {{0, 0, 0}, {1.0 / 3.0, 0, 0}, {0.5, 0, 0}};
  s.samples_per_probe = 20000;
  const auto est = admissibility_constant(cantor, 1.0, s, 21);
  EXPECT_LT(est.C_hat, 20.0);
}
