#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <nlohmann/json.hpp>

#include "growthbound/selfimprove.hpp"
#include "support/generators.hpp"

using namespace growthbound;

namespace {

constexpr double kPi = std::numbers::pi;
const double kE = std::exp(1.0);

// Independent rho_ad for g = t^{-b}: midpoint rule on int_0^U (mu^-(u^q) - nu + 2) du
// after u = U w^2, with U = mu(nu-1)^{1/q} = c a^{-(nu-1)/b}.
double rho_power_midpoint(double b, double a, double C1, double q, double nu, long n) {
  const double c = std::pow(C1, 1.0 / q);
  const double U = c * std::pow(a, -(nu - 1.0) / b);
  double s = 0.0;
  for (long i = 0; i < n; ++i) {
    const double w = (i + 0.5) / n;
    const double u = U * w * w;
    const double mu_inv = -b * std::log(u / c) / std::log(a);
    s += (mu_inv - nu + 2.0) * 2.0 * U * w;
  }
  return s / n;
}

double rho_power_closed(double b, double a, double C1, double q, double nu) {
  return (1.0 + b / std::log(a)) * std::pow(C1, 1.0 / q) * std::pow(a, -(nu - 1.0) / b);
}

bool non_increasing(const ImprovedBound& h, double lo, double hi, int n = 200) {
  double prev = kInfinity;
  for (double d : log_grid(lo, hi, n)) {
    const double v = h(d);
    if (!(v > 0.0) || v > prev * (1 + 1e-12)) return false;
    prev = v;
  }
  return true;
}

}  // namespace

// ------------------------------------------------------------- Lipschitz

TEST(LipschitzImprove, ConstantsForL2) {
  const auto b = lipschitz_improve(DecreasingFn::power_law(1.0, 1.0), ChartParams{2.0, 0.4}, 3);
  EXPECT_DOUBLE_EQ(b.constants.c1, 1.0 / 640.0);
  EXPECT_DOUBLE_EQ(b.constants.c2, 1.0 / 20.0);
  EXPECT_DOUBLE_EQ(b.tau, 0.2);
  EXPECT_EQ(b.method, BoundMethod::LipschitzTwoTerm);
}

TEST(LipschitzImprove, InverseDistanceIn3D) {
  const auto b = lipschitz_improve(DecreasingFn::power_law(1.0, 1.0), ChartParams{2.0, 0.4}, 3);
  for (double d : {1e-6, 1e-3, 0.05, 0.19}) EXPECT_NEAR(b(d), 1260.0 / d, 1e-9 * 1260.0 / d);
}

TEST(LipschitzImprove, DominatesProfile) {
  gbtest::Gen gen(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = gen.integer(2, 3);
    const auto g = DecreasingFn::psi_eta(gen.concave(), k);
    const double alpha = domain_radius(g);
    const ChartParams p{gen.uniform(2.0, 6.0), std::min(1.0, 1.9 * alpha) * gen.uniform(0.1, 1.0)};
    const auto b = lipschitz_improve(g, p, k);
    const double c1 = b.constants.c1, c2 = b.constants.c2;
    for (double d : log_grid(1e-6 * b.tau, b.tau * 0.999, 64)) {
      EXPECT_GE(b(d), g(d)) << g.family_name();
      EXPECT_GE(b(d), 2 * g(c1 * d) - g(c2 * d));
    }
    EXPECT_TRUE(non_increasing(b, 1e-6 * b.tau, 0.999 * b.tau));
  }
}

TEST(LipschitzImprove, Errors) {
  const auto g = DecreasingFn::power_law(1.0, 1.0);
  EXPECT_THROW(lipschitz_improve(g, ChartParams{1.5, 0.1}, 3), ChartError);
  const auto lg = DecreasingFn::log_power(1.0, 2.0);
  // As psi(eta) in the plane, log(2/t) lives on (0, 2): R must stay below 4.
  EXPECT_NO_THROW(lipschitz_improve(lg, ChartParams{2.0, 3.9}, 2));
  EXPECT_THROW(lipschitz_improve(lg, ChartParams{2.0, 4.0}, 2), ChartError);
  EXPECT_THROW(lipschitz_improve(g, ChartParams{2.0, 0.1}, 2), InvalidProfile);
  EXPECT_THROW(lipschitz_improve(DecreasingFn::power_law(1.0, 2.0), ChartParams{2.0, 0.1}, 3), InvalidProfile);
}

// ------------------------------------------------------------- convexity

TEST(ConvexityUpgrade, PowerLawClosedForm) {
  for (double b : {0.25, 0.5, 1.0}) {
    for (double L : {2.0, 3.5}) {
      const auto g = DecreasingFn::power_law(1.0, b);
      const auto two = lipschitz_improve(g, ChartParams{L, 0.3}, 3);
      const auto up = convexity_upgrade(g, two);
      const double c1 = two.constants.c1, c2 = two.constants.c2;
      const double v_star = std::pow(2 * std::pow(c1, -b) - std::pow(c2, -b), -1.0 / b);
      EXPECT_NEAR(up.constants.v, v_star, 1e-6 * v_star) << "b=" << b << " L=" << L;
      EXPECT_LE(up.constants.v, c1);
      EXPECT_EQ(up.method, BoundMethod::ConvexityUpgraded);
      EXPECT_GE(up.certificate.min_margin(), 0.0);
      EXPECT_EQ(up.certificate.grid.size(), 512u);
    }
  }
}

TEST(ConvexityUpgrade, LogarithmExact) {
  const auto g = DecreasingFn::log_power(1.0, 4.0);
  const auto two = lipschitz_improve(g, ChartParams{2.0, 0.5}, 2);
  const auto up = convexity_upgrade(g, two);
  const double c1 = two.constants.c1, c2 = two.constants.c2;
  EXPECT_NEAR(up.constants.v, c1 * c1 / c2, 1e-9 * c1 * c1 / c2);
  EXPECT_DOUBLE_EQ(up.tau, two.tau);
}

TEST(ConvexityUpgrade, BelowTwoTerm) {
  gbtest::Gen gen(5);
  for (int trial = 0; trial < 10; ++trial) {
    const double b = gen.uniform(0.1, 1.0);
    const auto g = DecreasingFn::power_law(gen.uniform(0.5, 3.0), b);
    const auto two = lipschitz_improve(g, ChartParams{gen.uniform(2.0, 5.0), 0.5}, 3);
    const auto up = convexity_upgrade(g, two);
    for (double d : log_grid(1e-5 * up.tau, up.tau, 50)) EXPECT_LE(two(d), up(d) * (1 + 1e-12));
    EXPECT_TRUE(non_increasing(up, 1e-6 * up.tau, up.tau));
  }
}

TEST(ConvexityUpgrade, ConcaveProfileRejected) {
  const auto two = lipschitz_improve(DecreasingFn::power_law(1.0, 1.0), ChartParams{2.0, 0.5}, 3);
  DecreasingFn::Custom c;
  c.label = "1 - t^2";
  c.value = [](double t) { return 1.0 - t * t; };
  const auto g = DecreasingFn::custom(c, Interval{0.0, 1.0});
  EXPECT_THROW(convexity_upgrade(g, two), UpgradeUnavailable);
}

// ------------------------------------------------------------ admissible

TEST(AdmissibleRho, PowerLawClosedForm) {
  for (double b : {0.5, 1.0, 2.0}) {
    for (double a : {1.1, kE}) {
      for (double q : {0.5, 1.0}) {
        const auto adm = admissibility_given(kPi, 2.0 - q, 2);
        const auto r = admissible_rho(DecreasingFn::power_law(1.0, b), adm, a);
        for (double nu : {1.01, 1.5, 3.0, 20.0}) {
          const double ref = rho_power_closed(b, a, kPi, q, nu);
          EXPECT_NEAR(r.rho_ad(nu), ref, 1e-9 * ref) << b << ' ' << a << ' ' << q << ' ' << nu;
        }
      }
    }
  }
}

TEST(AdmissibleRho, ClosedFormAgainstMidpoint) {
  for (double b : {0.5, 2.0}) {
    for (double nu : {1.2, 4.0}) {
      const double mid = rho_power_midpoint(b, 1.1, kPi, 1.0, nu, 1000000);
      const double ref = rho_power_closed(b, 1.1, kPi, 1.0, nu);
      EXPECT_NEAR(mid, ref, 1e-7 * ref);
    }
  }
}

TEST(AdmissibleRho, DirectFormAgrees) {
  const auto adm = admissibility_given(2.0, 1.0, 2);
  for (const auto& g : {DecreasingFn::power_law(1.0, 1.0), DecreasingFn::log_power(1.0, 1.0),
                        DecreasingFn::log_power(2.0, 3.0), DecreasingFn::exp_power(0.5),
                        DecreasingFn::psi_eta(ConcaveFn::power(0.5, 1.0, 1.0), 2)}) {
    const auto r = admissible_rho(g, adm, 1.5);
    EXPECT_LT(rho_ad_cross_check(r), 1e-5) << g.family_name();
  }
}

// Levels below the value of g at the right end of its domain clamp sigma to that end;
// g = log(4/t) on (0, 1) with a = e clamps for nu - 1 <= log log 4 and then gives
// rho(nu) = c int_0^1 (log log(4/w) - nu + 2) dw.
TEST(AdmissibleRho, ClampedSigmaAtOpenEnd) {
  const auto adm = admissibility_given(2.0, 1.0, 2);
  const auto g = DecreasingFn::psi_eta(ConcaveFn::power(1.0, 1.0, 0.0, std::log(4.0)), 2);
  const auto r = admissible_rho(g, adm, kE);
  for (double nu : {1.1, 1.25}) {
    const long n = 2000000;
    double s = 0.0;
    for (long i = 0; i < n; ++i) {
      const double v = (i + 0.5) / n;  // w = v^2
      s += (std::log(std::log(4.0 / (v * v))) - nu + 2.0) * 2.0 * v;
    }
    const double ref = 2.0 * s / n;
    EXPECT_NEAR(r.rho_ad(nu), ref, 1e-6 * std::abs(ref)) << nu;
  }
}

TEST(AdmissibleImprove, PowerLawBound) {
  for (double b : {0.5, 1.0, 2.0}) {
    for (double a : {1.1, kE}) {
      const auto adm = admissibility_given(kPi, 1.0, 2);
      const auto bound = admissible_improve(DecreasingFn::power_law(1.0, b), adm, a, 0.8);
      const double D = bound.constants.D;
      const double K = (1 + b / std::log(a)) * kPi;
      EXPECT_DOUBLE_EQ(bound.tau, 0.4);
      EXPECT_GE(D, 1.0);
      for (double d : {1e-5, 1e-3, 0.1, 0.39}) {
        const double ref = a * std::pow(3 * D * K / d, b);
        EXPECT_NEAR(bound(d), ref, 1e-5 * ref) << b << ' ' << a << ' ' << d;
      }
    }
  }
}

TEST(AdmissibleImprove, FloorAndMonotone) {
  const auto adm = admissibility_given(1.7, 1.2, 2);
  for (const auto& g : {DecreasingFn::power_law(2.0, 0.7), DecreasingFn::log_power(1.5, 1.0),
                        DecreasingFn::exp_power(0.4)}) {
    const auto r = admissible_rho(g, adm, 1.3);
    const auto bound = admissible_improve(r, 0.5);
    ASSERT_FALSE(bound.certificate.grid.empty());
    EXPECT_GE(bound.certificate.min_margin(), -1e-9) << g.family_name();
    for (double t : log_grid(1e-6, 0.1, 40)) {
      if (!g.domain().contains(t)) continue;
      EXPECT_GE(std::log(bound.constants.a) * r.rho_ad_inv(t) + 1e-9,
                std::log(bound.constants.a) + g.log_value(t));
    }
    EXPECT_TRUE(non_increasing(bound, 1e-6 * bound.tau, bound.tau, 60)) << g.family_name();
  }
}

TEST(AdmissibleImprove, Errors) {
  const auto adm = admissibility_given(1.0, 1.0, 2);
  EXPECT_THROW(admissible_improve(DecreasingFn::exp_power(1.5), adm, 1.5, 1.0), DivergentIntegral);
  EXPECT_THROW(admissible_improve(DecreasingFn::tabulated({{0.1, 5.0}, {1.0, 1.0}}), adm, 1.5, 1.0), InvalidProfile);
  EXPECT_THROW(admissible_improve(DecreasingFn::power_law(1.0, 1.0), adm, 1.0, 1.0), ArgumentError);
}

// ------------------------------------------------------------ power type

TEST(PowerType, PowerLawV) {
  for (double b : {0.5, 1.0, 2.0}) {
    const double a = 1.5;
    const auto adm = admissibility_given(kPi, 1.0, 2);
    const auto bound = power_type_bound(DecreasingFn::power_law(1.0, b), adm, a, 0.6);
    const double K = (1 + b / std::log(a)) * kPi;
    const double v = 1.0 / (3 * bound.constants.D * K);
    EXPECT_NEAR(bound.constants.v, v, 1e-6 * v);
    EXPECT_GE(bound.certificate.min_margin(), 0.0);
    EXPECT_EQ(bound.method, BoundMethod::PowerTypeClosed);
  }
}

TEST(PowerType, LogPowerFiniteLimit) {
  const auto adm = admissibility_given(2.0, 1.0, 2);
  const auto g = DecreasingFn::log_power(1.0, 1.0);
  const auto r = admissible_rho(g, adm, 1.5);
  const auto probe = limit_probe(r);
  EXPECT_FALSE(probe.diverges);
  EXPECT_LT(std::abs(probe.L), 0.2);
  const auto bound = power_type_bound(g, adm, 1.5, 0.5);
  EXPECT_GT(bound.constants.v, 0.0);
  EXPECT_LT(bound.constants.v, 1.0);
  EXPECT_GE(bound.certificate.min_margin(), 0.0);
  const auto adm_bound = admissible_improve(r, 0.5);
  for (double d : log_grid(1e-5, 0.2, 30)) EXPECT_GE(bound(d) * (1 + 1e-9), adm_bound(d));
}

TEST(PowerType, ExpPowerDiverges) {
  const auto adm = admissibility_given(1.0, 1.0, 2);
  EXPECT_THROW(power_type_bound(DecreasingFn::exp_power(0.5), adm, 1.5, 1.0), LimitDiverges);
}

TEST(PowerType, DualPathSameExponent) {
  // Segment in R^3: both the curve pipeline and the admissible pipeline apply.
  const double b = 0.8;
  const auto g = DecreasingFn::power_law(1.0, b);
  const auto lip = lipschitz_improve(g, ChartParams{2.0, 0.4}, 3);
  const auto adm = admissible_improve(g, admissibility_given(4.0, 1.0, 3), 1.5, 0.4);
  const double tau = std::min(lip.tau, adm.tau) / 2;
  const double r0 = lip(tau) / adm(tau);
  for (double d : log_grid(1e-6 * tau, tau, 20)) {
    const double r = lip(d) / adm(d);
    EXPECT_NEAR(r, r0, 1e-5 * r0);
  }
}

// ------------------------------------------------------------ asymptotics

TEST(Asymptotic, FastGrowthExponent) {
  const auto adm = admissibility_given(kPi, 1.0, 2);
  const struct {
    double alpha, slope, tol;
  } cases[] = {{1.0 / 3.0, 0.5, 0.05}, {0.5, 1.0, 0.05}, {0.9, 9.0, 0.5}};
  for (const auto& c : cases) {
    const double s = asymptotic_exponent(DecreasingFn::exp_power(c.alpha), adm, 1.1, 1e-4, 1e-2);
    EXPECT_NEAR(s, c.slope, c.tol) << "alpha=" << c.alpha;
  }
}

TEST(Asymptotic, AlphaAtLeastOne) {
  const auto adm = admissibility_given(kPi, 1.0, 2);
  EXPECT_THROW(asymptotic_exponent(DecreasingFn::exp_power(1.0), adm, 1.1, 1e-4, 1e-2), ArgumentError);
  EXPECT_THROW(asymptotic_exponent(DecreasingFn::exp_power(1.7), adm, 1.1, 1e-4, 1e-2), ArgumentError);
}

// ------------------------------------------------------------ output

TEST(ImprovedBoundOutput, JsonRecord) {
  const auto b = lipschitz_improve(DecreasingFn::power_law(1.0, 1.0), ChartParams{2.0, 0.4}, 3);
  const auto j = nlohmann::json::parse(improved_bound_json(b));
  EXPECT_EQ(j["method"], "LipschitzTwoTerm");
  EXPECT_DOUBLE_EQ(j["tau"].get<double>(), 0.2);
  EXPECT_DOUBLE_EQ(j["constants"]["c1"].get<double>(), 1.0 / 640.0);
  EXPECT_FALSE(j["constants"].contains("v"));
}
