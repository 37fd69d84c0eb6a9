#pragma once

#include <functional>
#include <string>
#include <vector>

#include "growthbound/domar.hpp"
#include "growthbound/geometry.hpp"
#include "growthbound/monotone.hpp"

namespace growthbound {

enum class BoundMethod { LipschitzTwoTerm, ConvexityUpgraded, AdmissibleRho, PowerTypeClosed };
std::string method_name(BoundMethod m);

/// Constants behind an improved bound; unused entries stay NaN.
struct BoundConstants {
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
  double c1 = kUnset, c2 = kUnset, L = kUnset, R = kUnset;
  double a = kUnset, D = kUnset, C1 = kUnset, p_star = kUnset, q_star = kUnset;
  double v = kUnset, tau1 = kUnset, beta = kUnset;
};

/// Grid on which a derived constant was validated, with the slack at each node.
struct Certificate {
  std::vector<double> grid;
  std::vector<double> margins;
  double min_margin() const;
};

/// u(x) <= h(dist(x, B)) for dist(x, B) < tau.
struct ImprovedBound {
  BoundMethod method = BoundMethod::LipschitzTwoTerm;
  std::function<double(double)> h;
  double tau = 0.0;
  BoundConstants constants;
  Certificate certificate;
  std::string note;

  double operator()(double d) const { return h(d); }
};

/// h(d) = 2 g(c1 d) - g(c2 d), c1 = 1/(160 L^2), c2 = 1/(10 L), tau = R/2.
/// A non-PsiEta g is rewritten as psi(eta) in dimension k first.
ImprovedBound lipschitz_improve(const DecreasingFn& g, const ChartParams& params, int k);

/// Largest v in (0, c1] with h(d) <= g(v d) on a 512-point log grid of (0, tau1].
/// Throws UpgradeUnavailable when g(t^beta) is not convex on the probe grid or
/// no tau1 validates v = c1/1024.
ImprovedBound convexity_upgrade(const DecreasingFn& g, const ImprovedBound& two_term, double beta = 1.0);

/// mu_ad, rho_ad and their inverses for an admissible set, lambda = 1.
struct AdmissibleRho {
  DecreasingFn g;
  double a = 0.0, D = 0.0, C1 = 1.0, p_star = 0.0, q_star = 0.0;
  int k = 2;
  DecreasingFn mu_ad, mu_ad_inv, rho_ad, rho_ad_inv;
};

/// rho_ad(nu) = c sigma [1 - (1/ln a) int_0^1 E(sigma w) dw] with c = C1^{1/q*},
/// sigma = g^-(a^{nu-1}) and E(s) = s g'(s)/g(s), the parts-integrated form.
/// Throws DivergentIntegral when the q-condition fails, InvalidProfile for tabulated g.
AdmissibleRho admissible_rho(const DecreasingFn& g, const AdmissibilityEstimate& adm, double a);
/// The same quantity integrated directly: c sigma int_0^1 (log_a g(sigma w) - nu + 2) dw.
double rho_ad_direct(const AdmissibleRho& r, double nu);
/// Largest relative gap between the two forms on 16 probes nu in [1.1, 1e6].
double rho_ad_cross_check(const AdmissibleRho& r);

/// h(d) = a^{rho_ad^-(d/(3D))}, tau = dist(A, boundary)/2.
ImprovedBound admissible_improve(const DecreasingFn& g, const AdmissibilityEstimate& adm, double a,
                                 double dist_A_boundary);
/// Same, reusing a constructed rho.
ImprovedBound admissible_improve(const AdmissibleRho& r, double dist_A_boundary);

/// t (mu_ad^-)'(t) at t = 1e-6 .. 1e-9 and the limit estimate q* lim t (mu_ad^-)'(t).
struct LimitProbe {
  std::vector<double> t;
  std::vector<double> values;
  double L = 0.0;
  bool diverges = false;
};
LimitProbe limit_probe(const AdmissibleRho& r);

/// h(d) = a g(v d) with the largest v in (0, 1) dominating the admissible bound
/// on a 512-point log grid. Throws LimitDiverges in the L = -inf regime.
ImprovedBound power_type_bound(const DecreasingFn& g, const AdmissibilityEstimate& adm, double a,
                               double dist_A_boundary);

/// Least-squares slope of log rho_ad^-(t) against log(1/t) over 16 log-spaced t in [t_lo, t_hi].
/// Requires g = ExpPower(alpha) with alpha < 1.
double asymptotic_exponent(const DecreasingFn& g, const AdmissibilityEstimate& adm, double a, double t_lo,
                           double t_hi);

/// JSON record {method, tau, constants, note, certificate summary}.
std::string improved_bound_json(const ImprovedBound& b);
/// (d, h(d)) rows under a `d,h` header.
void write_improved_bound_csv(const ImprovedBound& b, const std::vector<double>& d_grid, const std::string& path,
                              const std::string& stamp = "");

/// n log-spaced points in [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace growthbound
