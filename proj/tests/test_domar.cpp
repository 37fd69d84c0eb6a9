#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "growthbound/domar.hpp"
#include "support/generators.hpp"

using namespace growthbound;

namespace {

constexpr double kPi = std::numbers::pi;
const double kE = std::exp(1.0);

// f1(t) = exp(-c t) as a closed-form custom function.
DecreasingFn exp_decay(double c) {
  DecreasingFn::Custom cu;
  cu.label = "exp(-ct)";
  cu.value = [c](double t) { return std::exp(-c * t); };
  cu.limit_hi = 0.0;
  return DecreasingFn::custom(cu, Interval{0.0, kInfinity, false, false});
}

double simpson(const std::function<double(double)>& f, double a, double b, long n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (long i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(DomarConstants, ClosedForm) {
  const auto c = choose_constants(kE, 2.0, 1, 2);
  EXPECT_NEAR(c.D, 1.169965, 1e-5);
  EXPECT_NEAR(c.D, std::sqrt(kE / (kPi * (1 - 1 / kE))), 1e-12);
  EXPECT_LE(c.feasibility(c.D), 1.0);
  EXPECT_NEAR(c.feasibility(c.D), 1.0, 1e-12);
  EXPECT_GT(c.feasibility(c.D - 1e-6), 1.0);
  EXPECT_DOUBLE_EQ(c.S1, kPi);
}

TEST(DomarConstants, LargeLambdaLimit) {
  const auto c = choose_constants(kE, 2.0, 60, 2);
  EXPECT_NEAR(c.D, std::sqrt(kE / kPi), 1e-12);
}

TEST(DomarConstants, MinimalOnRandomInputs) {
  gbtest::Gen gen(1);
  for (int i = 0; i < 500; ++i) {
    const int k = gen.integer(2, 3);
    const double a = gen.uniform(1.01, 5.0);
    const double e = gen.coin() ? k : gen.uniform(0.3, k - 0.1);
    const int lam = gen.integer(1, 6);
    const auto c = choose_constants(a, e, lam, k);
    ASSERT_LE(c.feasibility(c.D), 1.0);
    ASSERT_NEAR(c.feasibility(c.D), 1.0, 1e-12);
    ASSERT_GT(c.feasibility(c.D - 1e-6), 1.0);
  }
  EXPECT_THROW(choose_constants(1.0, 2.0, 1, 2), ArgumentError);
}

TEST(Delta, Examples) {
  const auto d = delta_fn(2, 1.0, 1);
  EXPECT_DOUBLE_EQ(d(3.0), 2.0);
  EXPECT_LT(d(1e8), 1e-3);
  EXPECT_GT(d(2.0 + 1e-10), 1e4);
  EXPECT_THROW(d(2.0), DomainError);
  // Doubling lambda at fixed t - 1 - lambda scales by (2 lambda + 1)/(lambda + 1).
  for (int lam : {1, 2, 5}) {
    const auto d1 = delta_fn(3, 0.7, lam);
    const auto d2 = delta_fn(3, 0.7, 2 * lam);
    const double off = 0.37;
    EXPECT_NEAR(d2(2 * lam + 1 + off) / d1(lam + 1 + off), (2.0 * lam + 1) / (lam + 1.0), 1e-12);
  }
}

TEST(Psi, ExponentialAgainstIncompleteGamma) {
  for (double c : {0.5, 2.0}) {
    for (int k : {2, 3}) {
      const double eps = 1.0, m = k - 1 + eps;
      const auto psi = psi_fn(exp_decay(c), k, eps, 1);
      for (double t : {2.1, 3.0, 5.5, 12.0}) {
        const double x = t - 1.0;
        const double J = m * boost::math::tgamma(m, c * x) / std::pow(c, m);
        const double exact = std::pow(J + std::pow(x, m) * std::exp(-c * x), 1.0 / k);
        EXPECT_NEAR(psi(t), exact, 1e-6 * exact) << "c=" << c << " k=" << k << " t=" << t;
        // Independent dense Simpson reference on a truncated range.
        const double upper = x + 80.0 / c;
        const double Js = simpson([&](double u) { return std::exp(-c * u) * m * std::pow(u, m - 1); }, x, upper,
                                  1'000'000);
        const double ref = std::pow(Js + std::pow(x, m) * std::exp(-c * x), 1.0 / k);
        EXPECT_NEAR(psi(t), ref, 1e-6 * ref);
      }
    }
  }
}

TEST(Psi, CompactSupportGivesZero) {
  const double t0 = 4.0;
  const auto f1 = DecreasingFn::tabulated({{0.0, 2.0}, {t0, 0.0}, {10.0, 0.0}}, Interval{0.0, kInfinity, false, false});
  const auto psi = psi_fn(f1, 2, 1.0, 2);
  EXPECT_GT(psi(3.5), 0.0);
  EXPECT_EQ(psi(t0 + 2.0 + 1e-9), 0.0);
  EXPECT_EQ(psi(50.0), 0.0);
}

TEST(Psi, DivergentTailDetected) {
  // f1(t) = t^-2 with k = 2, eps = 1: integrand ~ 2 u / u^2 is not integrable.
  const auto f1 = DecreasingFn::power_law(1.0, 2.0);
  EXPECT_THROW(psi_fn(f1, 2, 1.0, 1), DivergentTail);
}

TEST(Psi, MonotoneOnProbes) {
  gbtest::Gen gen(2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = DecreasingFn::power_law(gen.log_uniform(0.5, 5), gen.uniform(0.5, 3.0));
    const auto f1 = f1_transform(f, gen.uniform(1.1, 3.0));
    const int k = gen.integer(2, 3);
    const auto psi = psi_fn(f1, k, gen.uniform(0.3, 2.0), gen.integer(1, 3));
    double prev = kInfinity;
    for (double t = psi.domain().lo + 1e-3; t < psi.domain().lo + 60; t += 0.37) {
      const double v = psi(t);
      ASSERT_LE(v, prev * (1 + 1e-12));
      prev = v;
    }
  }
}

TEST(TheoremA, InverseRadiusOnDisk) {
  // F = 1/|x| on the unit disk: f(s) = pi min(1, s^-2).
  const double a = 1.5;
  const auto f = DecreasingFn::tabulated({{0.0, kPi}, {1.0, kPi}}, Interval{0.0, 1.0, false, true});
  DecreasingFn::Custom fc;
  fc.label = "pi min(1, s^-2)";
  fc.value = [](double s) { return s <= 1.0 ? kPi : kPi / (s * s); };
  const auto fd = DecreasingFn::custom(fc, Interval{0.0, kInfinity, false, false});
  const auto maj = theorem_a(f1_transform(fd, a), 2, 1.0, 1, a);
  const auto omega = Region::ball({0, 0, 0}, 1.0, 2);
  // Ray toward the boundary: the bound increases.
  double prev = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double r = 1.0 - std::pow(10.0, -0.4 * i - 0.3);
    const double b = bound_A({r, 0, 0}, omega, maj);
    EXPECT_GE(b, prev);
    prev = b;
  }
  EXPECT_THROW(bound_A({1.5, 0, 0}, omega, maj), OutsideRegion);
  // Far interior: dist/D above phi(lambda+1+probe) gives a bound <= a^{lambda+1+probe}.
  for (double probe : {0.5, 2.0, 5.0}) {
    const double t = 2.0 + probe;
    const double d = maj.constants.D * maj.phi(t) * (1 + 1e-9);
    EXPECT_LE(bound_A_at(d, maj), std::pow(a, t) * (1 + 1e-9));
  }
  // Inverse law phi(phi^-(s)) <= s.
  for (double s : {1e-3, 0.1, 1.0, 10.0}) EXPECT_LE(maj.phi(maj.phi_inv(s)), s * (1 + 1e-12));
}

TEST(Mu, PointPowerLawBelowAnalytic) {
  const double a = 2.0, b = 1.0;
  const auto g = DecreasingFn::power_law(1.0, b);
  const auto F = Majorant::composed(g, SetDescr::point_cloud({{0, 0, 0}}, 2));
  const auto omega = Region::ball({0, 0, 0}, 1.0, 2);
  std::vector<double> nu;
  for (int i = 1; i <= 12; ++i) nu.push_back(0.5 * i);
  BallSchedule s = default_ball_schedule(omega, 3, {});
  s.fractions = {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  s.samples_per_ball = 40000;
  const auto est = mu_q_estimate(F, omega, 1.0, a, nu, s, 3);
  const auto exact = mu_analytic(g, kPi, 1.0, a, kInfinity, 2);
  for (double v : nu) {
    // The sup is the disk of radius sigma = a^{-nu/b} inside a ball of radius sigma: pi sigma.
    EXPECT_LE(est.mu(v), exact.mu(v) * 1.05) << v;
    EXPECT_GE(est.mu(v), exact.mu(v) * 0.5) << v;
    EXPECT_NEAR(exact.mu(v), kPi * std::pow(a, -v / b), 1e-12);
  }
  double prev = kInfinity;
  for (double v = 0.1; v < 10; v += 0.05) {
    ASSERT_LE(est.mu(v), prev);
    prev = est.mu(v);
  }
}

TEST(Mu, EmptySuperlevelAboveCap) {
  const auto F = Majorant::custom("min(1/|x|, 4)", [](const Point& x) { return std::min(1.0 / norm(x), 4.0); }, 2);
  const auto omega = Region::ball({0, 0, 0}, 1.0, 2);
  const auto est = mu_q_estimate(F, omega, 1.0, 2.0, {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}, default_ball_schedule(omega, 3, {}), 4);
  EXPECT_GT(est.mu(1.0), 0.0);
  EXPECT_EQ(est.mu(2.5), 0.0);  // 2^2.5 > 4
  // rho vanishes once mu(t - lambda) does.
  const auto rho = rho_fn(est, 1);
  EXPECT_EQ(rho(2.5 + 1.0), 0.0);
  EXPECT_GT(rho(1.5), 0.0);
}

TEST(Rho, PowerLawClosedForm) {
  for (double b : {0.5, 1.0, 2.0})
    for (double a : {1.1, kE})
      for (double q : {0.5, 1.0}) {
        const double C1 = 1.7;
        const auto mu = mu_analytic(DecreasingFn::power_law(1.0, b), C1, q, a, kInfinity, 2);
        const auto rho = rho_fn(mu, 1);
        for (double t : {1.2, 2.0, 4.5, 9.0}) {
          const double closed = (1 + b / std::log(a)) * std::pow(mu.mu(t - 1), 1 / q);
          EXPECT_NEAR(rho(t), closed, 1e-6 * closed) << b << " " << a << " " << q << " " << t;
          ASSERT_GE(rho(t), std::pow(mu.mu(t - 1), 1 / q) - 1e-12);
        }
      }
}

TEST(Rho, DenseQuadratureReference) {
  const double b = 1.0, a = kE, q = 1.0, C1 = 2.0;
  const auto mu = mu_analytic(DecreasingFn::power_law(1.0, b), C1, q, a, kInfinity, 2);
  const auto rho = rho_fn(mu, 1);
  const double t = 3.0;
  const double U = std::pow(mu.mu(t - 1), 1 / q);
  // Midpoint rule with 1e6 nodes on the explicit integrand -(b/q) log_a(u^q/C1) - t + 2.
  const long n = 1'000'000;
  double s = 0.0;
  for (long i = 0; i < n; ++i) {
    const double u = (i + 0.5) * U / n;
    s += -(b / q) * std::log(std::pow(u, q) / C1) / std::log(a) - t + 2.0;
  }
  s *= U / n;
  EXPECT_NEAR(rho(t), s, 1e-5 * s);
}

TEST(Rho, DivergentIntegralDetected) {
  EXPECT_THROW(rho_fn(mu_analytic(DecreasingFn::exp_power(1.5), 1.0, 1.0, 2.0, kInfinity, 2), 1), DivergentIntegral);
  EXPECT_NO_THROW(rho_fn(mu_analytic(DecreasingFn::exp_power(0.5), 1.0, 1.0, 2.0, kInfinity, 2), 1));
}

TEST(TheoremB, PowerLawBoundChain) {
  const double b = 1.0, a = 1.5, q = 1.0, C1 = 3.0;
  const auto mu = mu_analytic(DecreasingFn::power_law(1.0, b), C1, q, a, kInfinity, 2);
  const auto maj = theorem_b(mu, 1.0, 1, 2);
  const double K = (1 + b / std::log(a)) * std::pow(C1, 1 / q);
  const double D = maj.constants.D;
  for (double d : {1e-4, 1e-3, 1e-2, 0.1}) {
    // rho(t) = K a^{-(t-1)/b}  =>  rho^-(s) = 1 + b log_a(K/s)  =>  bound = a (K D/d)^b.
    const double closed = a * std::pow(K * D / d, b);
    EXPECT_NEAR(bound_B_at(d, maj), closed, 1e-6 * closed) << d;
  }
  for (double s : {1e-3, 0.1, 1.0}) EXPECT_LE(maj.rho(maj.rho_inv(s)), s * (1 + 1e-12));
}

TEST(TheoremB, ProductProfileFinite) {
  // F depends on x_0 only: F = |x_0|^{-1/2}, q* = 1.
  const auto omega = Region::box({-1, -1, 0}, {1, 1, 0}, 2);
  const auto F = Majorant::product(DecreasingFn::power_law(1.0, 0.5), 1, {0, 0, 0}, 2);
  std::vector<double> nu;
  for (int i = 1; i <= 40; ++i) nu.push_back(0.25 * i);
  const auto mu = mu_q_estimate(F.with_cap(1e3), omega, 1.0, 2.0, nu, default_ball_schedule(omega, 5, {{0, 0, 0}}), 5);
  const auto maj = theorem_b(mu, 1.0, 1, 2);
  for (double x0 : {0.0, 0.5, 0.9}) EXPECT_TRUE(std::isfinite(bound_B({x0, 0.1, 0}, omega, maj)));
}
