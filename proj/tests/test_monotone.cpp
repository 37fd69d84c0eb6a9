#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "growthbound/monotone.hpp"
#include "support/generators.hpp"

using namespace growthbound;

namespace {

// Brute-force inf{t : f(t) <= s} over a uniform grid of the given interval.
double scan_inverse(const DecreasingFn& f, double s, double lo, double hi, int n) {
  for (int i = 0; i <= n; ++i) {
    const double t = std::min(hi, lo + (hi - lo) * i / n);
    if (f(t) <= s) return t;
  }
  return hi;
}

DecreasingFn step_function() {
  // 2 on [0,1], jump to 1 right after t = 1, then 1 on (1,2]. Left-continuous.
  return DecreasingFn::tabulated({{0.0, 2.0}, {1.0, 2.0}, {1.0, 1.0}, {2.0, 1.0}}, std::nullopt, false);
}

}  // namespace

TEST(Eval, ClosedFormExamples) {
  EXPECT_DOUBLE_EQ(DecreasingFn::power_law(1.0, 2.0)(0.5), 4.0);
  EXPECT_NEAR(DecreasingFn::exp_power(1.0)(1.0), std::numbers::e, 1e-15);
  EXPECT_NEAR(DecreasingFn::log_power(1.0, 1.0)(std::exp(-2.0)), 2.0, 1e-15);
}

TEST(Eval, TabulatedHitsKnotsExactly) {
  std::vector<DecreasingFn::Knot> knots;
  for (int i = 1; i <= 50; ++i) knots.push_back({0.1 * i, 1.0 / (0.1 * i)});
  auto f = DecreasingFn::tabulated(knots);
  for (const auto& k : knots) EXPECT_EQ(f(k.t), k.value);
}

TEST(Eval, OutsideDomainThrows) {
  EXPECT_THROW(DecreasingFn::power_law(1.0, 1.0)(0.0), DomainError);
  EXPECT_THROW(DecreasingFn::log_power(1.0, 1.0)(0.5), DomainError);
  EXPECT_THROW(DecreasingFn::power_law(1.0, 1.0)(-1.0), DomainError);
}

TEST(FundamentalEta, Examples) {
  EXPECT_DOUBLE_EQ(fundamental_eta(3)(0.5), 2.0);
  EXPECT_NEAR(fundamental_eta(2)(std::exp(-1.0)), 1.0, 1e-15);
  EXPECT_NEAR(fundamental_eta(4)(0.1), 100.0, 1e-12);
  EXPECT_THROW(fundamental_eta(1), ArgumentError);
}

TEST(FundamentalEta, Domains) {
  EXPECT_EQ(fundamental_eta(2).domain().hi, 1.0);
  EXPECT_TRUE(std::isinf(fundamental_eta(3).domain().hi));
  EXPECT_EQ(fundamental_eta(2).domain().lo, 0.0);
}

TEST(GenInverse, PowerLaw) {
  auto inv = gen_inverse(DecreasingFn::power_law(1.0, 2.0));
  EXPECT_NEAR(inv(4.0), 0.5, 1e-15);
  EXPECT_LE(DecreasingFn::power_law(1.0, 2.0)(inv(4.0)), 4.0);
}

TEST(GenInverse, StepFunctionUsesInfConvention) {
  auto f = step_function();
  auto inv = gen_inverse(f);
  EXPECT_EQ(inv(1.0), 1.0);  // preimage of the lower value is (1,2]
  EXPECT_EQ(inv(1.5), 1.0);
  EXPECT_EQ(inv(2.0), 0.0);
  EXPECT_EQ(inv(5.0), 0.0);
  EXPECT_THROW(inv(0.5), DomainError);
}

TEST(GenInverse, TabulatedExpAgainstBruteForceScan) {
  std::vector<DecreasingFn::Knot> knots;
  const int n = 4000;
  for (int i = 0; i <= n; ++i) {
    const double t = 0.25 + 4.75 * i / n;
    knots.push_back({t, std::exp(1.0 / t)});
  }
  auto f = DecreasingFn::tabulated(knots);
  auto inv = gen_inverse(f);
  const double got = inv(std::numbers::e);
  const double scan = scan_inverse(f, std::numbers::e, 0.25, 5.0, 1'000'000);
  EXPECT_NEAR(got, 1.0, 1e-5);
  EXPECT_NEAR(got, scan, 4.75 / 1'000'000 + 1e-12);
}

TEST(GenInverse, ClosedFormFamiliesMatchAnalyticInverse) {
  EXPECT_NEAR(gen_inverse(DecreasingFn::exp_power(0.5))(std::exp(2.0)), 0.25, 1e-14);
  EXPECT_NEAR(gen_inverse(DecreasingFn::log_power(2.0, 1.0))(4.0), std::exp(-2.0), 1e-14);
  EXPECT_NEAR(gen_inverse(fundamental_eta(3))(4.0), 0.25, 1e-15);
  EXPECT_NEAR(gen_inverse(fundamental_eta(2))(3.0), std::exp(-3.0), 1e-16);
}

TEST(GenInverse, LevelInverseAvoidsOverflow) {
  auto g = DecreasingFn::exp_power(0.5);
  // log g(t) = t^{-1/2} <= 1e6  <=>  t >= 1e-12
  EXPECT_NEAR(g.log_level_inverse(1e6) / 1e-12, 1.0, 1e-12);
  auto p = DecreasingFn::power_law(2.0, 1.0);
  EXPECT_NEAR(p.log_level_inverse(1000.0), 2.0 * std::exp(-1000.0), 1e-300);
}

TEST(RightRegularize, ContinuousIsIdentity) {
  auto f = DecreasingFn::power_law(3.0, 1.5);
  auto r = right_regularize(f);
  for (double t : {0.01, 0.3, 1.0, 7.0}) EXPECT_EQ(f(t), r(t));
}

TEST(RightRegularize, JumpTakesRightLimit) {
  auto f = step_function();
  EXPECT_EQ(f(1.0), 2.0);
  EXPECT_EQ(right_regularize(f)(1.0), 1.0);
}

TEST(RightRegularize, InverseUnchangedOnRandomProbes) {
  gbtest::Gen gen(7);
  for (int rep = 0; rep < 20; ++rep) {
    auto f = gen.tabulated();
    auto a = gen_inverse(f);
    auto b = gen_inverse(right_regularize(f));
    const double lo = f.domain().lo, hi = f.domain().hi;
    for (int i = 0; i < 50; ++i) {
      const double s = gen.level(f);
      EXPECT_EQ(a(s), b(s));
      // Oracle: inverse of a piecewise-linear function evaluated by dense scan.
      EXPECT_NEAR(a(s), scan_inverse(f, s, lo, hi, 200'000), (hi - lo) / 200'000 + 1e-12);
    }
  }
}

TEST(Derivative, Examples) {
  EXPECT_DOUBLE_EQ(DecreasingFn::power_law(1.0, 1.0).derivative(2.0), -0.25);
  // d/dt log(eps/t) = -1/t for every eps; eps = 2 keeps t = 0.5 inside the clipped domain.
  EXPECT_DOUBLE_EQ(DecreasingFn::log_power(1.0, 2.0).derivative(0.5), -2.0);
  EXPECT_THROW(DecreasingFn::log_power(1.0, 1.0).derivative(0.5), DomainError);
  EXPECT_THROW(DecreasingFn::power_law(1.0, 1.0).derivative(-1.0), DomainError);
}

TEST(Derivative, TabulatedFiniteDifferenceConverges) {
  std::vector<DecreasingFn::Knot> knots;
  const int n = 200'000;
  for (int i = 0; i <= n; ++i) {
    const double t = 1.0 + 2.0 * i / n;
    knots.push_back({t, 1.0 / t});
  }
  auto tab = DecreasingFn::tabulated(knots);
  auto exact = DecreasingFn::power_law(1.0, 1.0);
  for (double t = 1.05; t < 2.95; t += 0.0137) {
    const double h_fd = 1e-5 * t;
    EXPECT_LE(std::abs(tab.derivative(t) - exact.derivative(t)), 10 * h_fd) << t;
    EXPECT_LE(tab.derivative(t), 0.0);
  }
}

TEST(Properties, InverseLawAcrossFamilies) {
  gbtest::Gen gen(11);
  for (int rep = 0; rep < 300; ++rep) {
    // The law is stated for right-continuous functions; left-continuous
    // tables are checked through their regularization.
    auto f = right_regularize(gen.any_family());
    auto inv = gen_inverse(f);
    for (int i = 0; i < 30; ++i) {
      const double s = gen.level(f);
      const double t = inv(s);
      EXPECT_LE(f(t), s + 1e-9) << f.family_name() << " s=" << s;
    }
  }
}

TEST(Properties, InverseIsNonIncreasing) {
  gbtest::Gen gen(12);
  for (int rep = 0; rep < 100; ++rep) {
    auto f = gen.any_family();
    auto inv = gen_inverse(f);
    std::vector<double> s;
    for (int i = 0; i < 40; ++i) s.push_back(gen.level(f));
    std::sort(s.begin(), s.end());
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LE(inv(s[i]), inv(s[i - 1])) << f.family_name();
  }
}

TEST(Properties, DoubleInverseRecoversContinuousFunction) {
  gbtest::Gen gen(13);
  for (int rep = 0; rep < 20; ++rep) {
    DecreasingFn f = rep % 2 ? DecreasingFn::power_law(gen.log_uniform(0.5, 2.0), gen.uniform(0.5, 2.0))
                             : DecreasingFn::psi_eta(gen.concave(), 3);
    auto back = gen_inverse(gen_inverse(f));
    auto reg = right_regularize(f);
    for (int i = 0; i < 50; ++i) {
      const double t = gen.domain_point(f);
      EXPECT_NEAR(back(t), reg(t), 1e-9 * (1.0 + reg(t)));
    }
  }
}

TEST(Properties, PowerLawScaling) {
  gbtest::Gen gen(14);
  for (int i = 0; i < 200; ++i) {
    const double C = gen.log_uniform(0.1, 10.0), b = gen.uniform(0.1, 4.0);
    auto f = DecreasingFn::power_law(C, b);
    const double c = gen.log_uniform(0.01, 100.0), t = gen.log_uniform(1e-3, 1e3);
    EXPECT_NEAR(f(c * t), std::pow(c, -b) * f(t), 1e-12 * f(c * t));
  }
}

TEST(Properties, LogPowerWeakSingularity) {
  auto f = DecreasingFn::log_power(1.0, 1.0);
  const double ratio = f(0.5 * 1e-8) / f(1e-8);
  EXPECT_GE(ratio, 1.0);
  EXPECT_LE(ratio, 1.1);
  EXPECT_TRUE(f.blows_up_at_lo(1e-12));
}

TEST(Properties, ConcaveTriples) {
  gbtest::Gen gen(15);
  for (int rep = 0; rep < 50; ++rep) {
    auto psi = gen.concave();
    EXPECT_TRUE(psi.concavity_probe());
    for (int i = 0; i < 100; ++i) {
      double s[3];
      for (double& x : s) x = psi.beta() + gen.log_uniform(1e-4, 1e4);
      std::sort(s, s + 3);
      if (s[0] == s[2]) continue;
      const double w = (s[1] - s[0]) / (s[2] - s[0]);
      EXPECT_GE(psi(s[1]), (1 - w) * psi(s[0]) + w * psi(s[2]) - 1e-9 * (1 + psi(s[1])));
    }
  }
  EXPECT_FALSE(ConcaveFn::power(2.0).concavity_probe());
}

TEST(PsiEta, ConversionsAreExact) {
  auto g = DecreasingFn::power_law(2.0, 1.0);
  auto q = as_psi_eta(g, 3);
  for (double t : {1e-4, 0.01, 0.5, 3.0}) EXPECT_NEAR(q(t), g(t), 1e-12 * g(t));
  auto l = DecreasingFn::log_power(0.8, 4.0);
  for (int k : {2, 3}) {
    auto ql = as_psi_eta(l, k);
    for (double t : {1e-6, 1e-3, 0.1, 1.0}) EXPECT_NEAR(ql(t), l(t), 1e-12 * l(t)) << k;
    EXPECT_NEAR(domain_radius(ql), 4.0, 1e-12);
  }
  EXPECT_THROW(as_psi_eta(DecreasingFn::power_law(1.0, 2.0), 3), InvalidProfile);
  EXPECT_THROW(as_psi_eta(DecreasingFn::power_law(1.0, 1.0), 2), InvalidProfile);
}

TEST(GenInverse, OpenEndThatFailsToEvaluate) {
  const auto f = DecreasingFn::psi_eta(ConcaveFn::log_power(0.5, 1.0, 1.3), 3);
  EXPECT_THROW(f(f.domain().last_point()), DomainError);
  const auto inv = gen_inverse(f);
  for (double s : {1e-3, 1e-2, 0.1, 0.5}) {
    const double t = inv(s);
    EXPECT_LE(f(t), s);
    EXPECT_LT(t, f.domain().hi);
  }
}

TEST(Bisect, FindsSmallestDouble) {
  const double x = bisect_doubles(0.0, 10.0, [](double t) { return t >= 3.0; });
  EXPECT_EQ(x, 3.0);
  const double y = bisect_doubles(-5.0, 5.0, [](double t) { return t > -1.0; });
  EXPECT_EQ(y, std::nextafter(-1.0, 0.0));
}
