#pragma once

#include <functional>
#include <string>
#include <vector>

#include "growthbound/geometry.hpp"
#include "growthbound/measure.hpp"
#include "growthbound/monotone.hpp"

namespace growthbound {

struct DomarConstants {
  double a = 0.0;
  double exponent = 0.0;  // k (Theorem A) or q* (Theorem B)
  int lambda = 1;
  double D = 0.0;
  double S1 = 0.0;  // volume of the unit k-ball
  int k = 2;

  /// a/(D^exponent S1) + a^-lambda; feasible when <= 1.
  double feasibility(double d) const;
  double S_R(double R) const;
};

/// Minimal D for the given lambda: D = (a / (S1 (1 - a^-lambda)))^(1/exponent).
DomarConstants choose_constants(double a, double exponent, int lambda, int k);

/// delta(t) = (lambda+1) ((k-1)/eps)^((k-1)/k) (t-1-lambda)^(-eps/k) on (lambda+1, inf).
DecreasingFn delta_fn(int k, double eps, int lambda);

/// psi(t) = [J(t - lambda) + (t-lambda)^m f1(t-lambda)]^(1/k), m = k-1+eps, where
/// J(x) = int_x^inf f1(u) m u^(m-1) du, on (lambda+1, inf). Throws DivergentTail
/// when J(1) does not converge.
DecreasingFn psi_fn(const DecreasingFn& f1, int k, double eps, int lambda);

/// Smallest t in (lo, inf) with f(t) <= s for a non-increasing f; +inf when none is found.
double level_inverse(const std::function<double(double)>& f, double lo, double s);

struct TheoremAMajorant {
  double eps = 1.0;
  int k = 2;
  int lambda = 1;
  DomarConstants constants;
  DecreasingFn f1, delta, psi, phi, phi_inv;
};

TheoremAMajorant theorem_a(const DecreasingFn& f1, int k, double eps, int lambda, double a);

/// a^{phi^-(dist(x, boundary)/D)}; +inf when the exponent passes 700/ln a.
double bound_A(const Point& x, const Region& omega, const TheoremAMajorant& maj);
/// Same bound as a function of the boundary distance.
double bound_A_at(double boundary_distance, const TheoremAMajorant& maj);

/// mu_{q*} together with a stable evaluation of mu^-(u^{q*}).
struct MuFunction {
  DecreasingFn mu = DecreasingFn::tabulated({{1.0, 0.0}, {2.0, 0.0}});
  std::function<double(double)> inv_root;  // u -> mu^-(u^{q*})
  std::vector<double> u_breaks;             // discontinuities of inv_root, ascending
  double q_star = 1.0;
  double a = 0.0;
  std::string source;
};

/// mu(nu) = min(C1 g^-(a^nu)^{q*}, S1 R_in^{q*}) for F = g(dist(., A)) with A
/// admissible; R_in = inf drops the containment cap.
MuFunction mu_analytic(const DecreasingFn& g, double C1, double q_star, double a, double inradius, int k);

struct BallSchedule {
  std::vector<Point> centers;
  std::vector<double> fractions{1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125};  // of dist(x, boundary)
  long samples_per_ball = 20000;
};

/// Lattice centres inside the region (n per axis over the bounding box) plus extra points.
BallSchedule default_ball_schedule(const Region& omega, int per_axis, const std::vector<Point>& extra);

/// sup over scheduled balls B(x,R) in Omega of m(F_nu n B)/R^{p*}, F_nu = {F >= a^nu} for the
/// capped majorant,
/// tabulated as a right-continuous step function over the nu-grid.
MuFunction mu_q_estimate(const Majorant& F, const Region& omega, double p_star, double a,
                         const std::vector<double>& nu_grid, const BallSchedule& schedule, std::uint64_t seed);

/// rho(t) = int_0^{mu(t-lambda)^{1/q*}} (mu^-(u^{q*}) - t + 1 + lambda) du on (lambda, inf).
/// Throws DivergentIntegral when int_0^1 mu^-(u^{q*}) du diverges.
DecreasingFn rho_fn(const MuFunction& mu, int lambda);

/// Probe of int_0^1 mu^-(u^{q*}) du by dyadic panels toward 0; returns the value.
double q_cond2_probe(const MuFunction& mu);

struct TheoremBMajorant {
  double p_star = 1.0, q_star = 1.0;
  int lambda = 1;
  DomarConstants constants;
  MuFunction mu;
  DecreasingFn rho, rho_inv;
};

TheoremBMajorant theorem_b(const MuFunction& mu, double p_star, int lambda, int k);

double bound_B(const Point& x, const Region& omega, const TheoremBMajorant& maj);
double bound_B_at(double boundary_distance, const TheoremBMajorant& maj);

/// a^e with the overflow sentinel: +inf once e ln a > 700.
double power_of_a(double a, double e);

void write_theorem_a_csv(const TheoremAMajorant& maj, const std::vector<double>& t_grid, const std::string& path,
                              const std::string& stamp = "");
void write_theorem_b_csv(const TheoremBMajorant& maj, const std::vector<double>& nu_grid, const std::string& path,
                              const std::string& stamp = "");

}  // namespace growthbound
