#include "growthbound/selfimprove.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>

#include "growthbound/quadrature.hpp"

namespace growthbound {

namespace {

constexpr int kGridPoints = 512;
constexpr int kBisectSteps = 40;

// E(s) = s g'(s)/g(s), written per family so that tiny s does not overflow.
double elasticity(const DecreasingFn& g, double s) {
  if (const auto* p = g.as<DecreasingFn::PowerLaw>()) return -p->b;
  if (const auto* e = g.as<DecreasingFn::ExpPower>()) return -e->alpha * std::pow(s, -e->alpha);
  if (const auto* l = g.as<DecreasingFn::LogPower>()) return -l->b / std::log(l->eps_scale / s);
  if (const auto* q = g.as<DecreasingFn::PsiEta>()) {
    const double eta = eta_value(q->k, s);
    const double s_deta = q->k == 2 ? -1.0 : -(q->k - 2.0) * eta;
    return q->psi.derivative(eta) * s_deta / q->psi(eta);
  }
  return s * g.log_derivative(s);
}

void require_differentiable(const DecreasingFn& g) {
  if (g.is_tabulated()) throw InvalidProfile("a tabulated profile has no derivative for the admissible pipeline");
  if (const auto* c = g.as<DecreasingFn::Custom>(); c && !c->deriv)
    throw InvalidProfile("custom profile '" + c->label + "' carries no derivative");
}

int dimension_of(const AdmissibilityEstimate& adm) {
  const int k = static_cast<int>(std::lround(adm.p_star + adm.q_star));
  if (k < 2 || k > kMaxDim || std::abs(adm.p_star + adm.q_star - k) > 1e-9)
    throw ArgumentError("admissibility record has p* + q* = " + format_double(adm.p_star + adm.q_star));
  return k;
}

struct Sigma {
  double value;
  bool clamped;
};

// sigma(nu) = g^-(a^{nu-1}); clamped to the right end when a^{nu-1} is below the range of g.
Sigma sigma_of(const DecreasingFn& g, double level) {
  const double lim = g.limit_hi();
  if (lim > 0.0 && level <= std::log(lim)) return {g.domain().hi, true};
  return {g.log_level_inverse(level), false};
}

double rho_parts(const DecreasingFn& g, double c, double ln_a, double nu) {
  const Sigma sg = sigma_of(g, (nu - 1.0) * ln_a);
  const double sigma = sg.value;
  constexpr double kTiny = std::numeric_limits<double>::min();
  if (sigma < kTiny) return 0.0;  // subnormal radii: rho is below 1e-300
  if (!std::isfinite(sigma)) return kInfinity;
  const double integral =
      quad::finite([&](double w) { return elasticity(g, std::max(sigma * w, kTiny)); }, 0.0, 1.0, 1e-12);
  const double boundary = sg.clamped ? std::log(g.limit_hi()) / ln_a - nu + 2.0 : 1.0;
  return c * sigma * (boundary - integral / ln_a);
}

}  // namespace

std::string method_name(BoundMethod m) {
  switch (m) {
    case BoundMethod::LipschitzTwoTerm: return "LipschitzTwoTerm";
    case BoundMethod::ConvexityUpgraded: return "ConvexityUpgraded";
    case BoundMethod::AdmissibleRho: return "AdmissibleRho";
    case BoundMethod::PowerTypeClosed: return "PowerTypeClosed";
  }
  return "unknown";
}

double Certificate::min_margin() const {
  double m = kInfinity;
  for (double v : margins) m = std::min(m, v);
  return m;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw ArgumentError("log_grid needs 0 < lo <= hi and n >= 1");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = hi;
    return out;
  }
  const double l0 = std::log(lo), step = (std::log(hi) - l0) / (n - 1);
  for (int i = 0; i < n; ++i) out[i] = std::exp(l0 + step * i);
  out.front() = lo;
  out.back() = hi;
  return out;
}

// ------------------------------------------------------------ Lipschitz curves

ImprovedBound lipschitz_improve(const DecreasingFn& g, const ChartParams& params, int k) {
  DecreasingFn ge = g;
  if (const auto* q = g.as<DecreasingFn::PsiEta>()) {
    if (!q->psi.concavity_probe()) throw InvalidProfile("psi = " + q->psi.describe() + " fails the concavity probe");
  } else {
    ge = as_psi_eta(g, k);
  }
  validate_chart_params(params, domain_radius(ge));
  const double c1 = 1.0 / (160.0 * params.L * params.L);
  const double c2 = 1.0 / (10.0 * params.L);
  ImprovedBound out;
  out.method = BoundMethod::LipschitzTwoTerm;
  out.tau = params.R / 2.0;
  const auto two = [ge, c1, c2](double d) { return 2.0 * ge(c1 * d) - ge(c2 * d); };
  const auto grid = log_grid(1e-12 * out.tau, out.tau, 4096);
  bool monotone = true;
  for (std::size_t i = 1; i < grid.size() && monotone; ++i) monotone = two(grid[i]) <= two(grid[i - 1]);
  if (monotone) {
    out.h = two;
  } else {
    // On [d_i, d_{i+1}) use 2g(c1 d) - g(c2 d_{i+1}) >= h, joined with the suffix max of
    // the per-cell upper bounds. Non-increasing and above h on (0, tau).
    const std::size_t n = grid.size();
    std::vector<double> suffix(n, -kInfinity);
    for (std::size_t i = n - 1; i-- > 0;)
      suffix[i] = std::max(suffix[i + 1], 2.0 * ge(c1 * grid[i]) - ge(c2 * grid[i + 1]));
    out.h = [ge, c1, c2, grid, suffix, two](double d) {
      if (d < grid.front()) return std::max(two(d), suffix.front());
      if (d >= grid.back()) return two(d);
      const std::size_t i = std::upper_bound(grid.begin(), grid.end(), d) - grid.begin() - 1;
      return std::max(2.0 * ge(c1 * d) - ge(c2 * grid[i + 1]), suffix[i + 1]);
    };
    out.note = "two-term profile is not monotone; using its non-increasing cell majorant";
  }
  out.constants.c1 = c1;
  out.constants.c2 = c2;
  out.constants.L = params.L;
  out.constants.R = params.R;
  return out;
}

ImprovedBound convexity_upgrade(const DecreasingFn& g, const ImprovedBound& two_term, double beta) {
  if (two_term.method != BoundMethod::LipschitzTwoTerm)
    throw ArgumentError("convexity_upgrade expects a two-term Lipschitz bound");
  if (!(beta > 0.0)) throw ArgumentError("convexity_upgrade needs beta > 0");
  const double c1 = two_term.constants.c1, c2 = two_term.constants.c2, tau = two_term.tau;

  // Convexity of t -> g(t^beta) on a log grid whose image covers [1e-6 tau, tau].
  const auto probe = log_grid(std::pow(1e-6 * tau, 1.0 / beta), std::pow(tau, 1.0 / beta), 200);
  for (std::size_t i = 1; i + 1 < probe.size(); ++i) {
    const double t0 = probe[i - 1], t1 = probe[i], t2 = probe[i + 1];
    const double f0 = g(std::pow(t0, beta)), f1 = g(std::pow(t1, beta)), f2 = g(std::pow(t2, beta));
    const double chord = f0 + (f2 - f0) * (t1 - t0) / (t2 - t0);
    if (f1 > chord + 1e-9 * std::max(1.0, std::abs(chord)))
      throw UpgradeUnavailable("g(t^" + format_double(beta) + ") is not convex near t = " + format_double(t1));
  }

  const auto two = [&](double d) { return 2.0 * g(c1 * d) - g(c2 * d); };
  const auto holds = [&](double v, double tau1) {
    for (double d : log_grid(1e-6 * tau1, tau1, kGridPoints))
      if (two(d) > g(v * d)) return false;
    return true;
  };

  const double v_floor = c1 / 1024.0;
  double tau1 = tau;
  int halvings = 0;
  while (!holds(v_floor, tau1)) {
    if (++halvings > 30) throw UpgradeUnavailable("no radius validates v = c1/1024");
    tau1 *= 0.5;
  }
  double v = c1;
  if (!holds(c1, tau1)) {
    double lo = v_floor, hi = c1;
    for (int i = 0; i < kBisectSteps; ++i) {
      const double mid = 0.5 * (lo + hi);
      (holds(mid, tau1) ? lo : hi) = mid;
    }
    v = lo;
  }

  ImprovedBound out;
  out.method = BoundMethod::ConvexityUpgraded;
  out.h = [g, v](double d) { return g(v * d); };
  out.tau = tau1;
  out.constants = two_term.constants;
  out.constants.v = v;
  out.constants.tau1 = tau1;
  out.constants.beta = beta;
  out.certificate.grid = log_grid(1e-6 * tau1, tau1, kGridPoints);
  for (double d : out.certificate.grid) out.certificate.margins.push_back(g(v * d) - two(d));
  return out;
}

// ---------------------------------------------------------- admissible sets

AdmissibleRho admissible_rho(const DecreasingFn& g, const AdmissibilityEstimate& adm, double a) {
  require_differentiable(g);
  if (!(a > 1.0)) throw ArgumentError("admissible_rho needs a > 1");
  const int k = dimension_of(adm);
  const double q = adm.q_star;
  const double C1 = adm.C1();

  const MuFunction mu = mu_analytic(g, C1, q, a, kInfinity, k);
  q_cond2_probe(mu);

  AdmissibleRho r{g, a, std::max(choose_constants(a, q, 1, k).D, 1.0), C1, adm.p_star, q, k, mu.mu, mu.mu, mu.mu,
                  mu.mu};

  const auto inv_root = mu.inv_root;
  DecreasingFn::Custom minv;
  minv.label = "mu_ad_inv";
  minv.value = [inv_root, q](double t) { return inv_root(std::pow(t, 1.0 / q)); };
  minv.limit_hi = 0.0;
  r.mu_ad_inv = DecreasingFn::custom(std::move(minv), Interval{0.0, kInfinity});

  const double c = std::pow(C1, 1.0 / q), ln_a = std::log(a);
  DecreasingFn::Custom rho;
  rho.label = "rho_ad";
  rho.value = [g, c, ln_a](double nu) { return rho_parts(g, c, ln_a, nu); };
  rho.limit_hi = 0.0;
  r.rho_ad = DecreasingFn::custom(std::move(rho), Interval{1.0, kInfinity});

  const DecreasingFn rho_fn_ = r.rho_ad;
  DecreasingFn::Custom inv;
  inv.label = "rho_ad_inv";
  inv.value = [rho_fn_](double t) { return level_inverse([&](double nu) { return rho_fn_(nu); }, 1.0, t); };
  inv.limit_hi = 1.0;
  r.rho_ad_inv = DecreasingFn::custom(std::move(inv), Interval{0.0, kInfinity});
  return r;
}

double rho_ad_direct(const AdmissibleRho& r, double nu) {
  if (!(nu > 1.0)) throw DomainError("rho_ad is defined for nu > 1");
  const double ln_a = std::log(r.a), c = std::pow(r.C1, 1.0 / r.q_star);
  const double sigma = sigma_of(r.g, (nu - 1.0) * ln_a).value;
  constexpr double kTiny = std::numeric_limits<double>::min();
  if (sigma < kTiny) return 0.0;
  if (!std::isfinite(sigma)) return kInfinity;
  const DecreasingFn& g = r.g;
  const double integral = quad::finite(
      [&](double w) { return g.log_value(std::max(sigma * w, kTiny)) / ln_a - nu + 2.0; }, 0.0, 1.0, 1e-12);
  return c * sigma * integral;
}

double rho_ad_cross_check(const AdmissibleRho& r) {
  double worst = 0.0;
  for (int j = 0; j < 16; ++j) {
    const double nu = 1.0 + std::pow(10.0, -1.0 + 7.0 * j / 15.0);
    const double p = r.rho_ad(nu), d = rho_ad_direct(r, nu);
    if (p == d) continue;
    const double scale = std::max(std::abs(p), std::abs(d));
    worst = std::max(worst, std::isfinite(scale) ? std::abs(p - d) / scale : kInfinity);
  }
  return worst;
}

ImprovedBound admissible_improve(const AdmissibleRho& r, double dist_A_boundary) {
  if (!(dist_A_boundary > 0.0)) throw ArgumentError("admissible_improve needs dist(A, boundary) > 0");
  ImprovedBound out;
  out.method = BoundMethod::AdmissibleRho;
  const DecreasingFn rinv = r.rho_ad_inv;
  const double a = r.a, D3 = 3.0 * r.D;
  out.h = [rinv, a, D3](double d) { return power_of_a(a, rinv(d / D3)); };
  out.tau = dist_A_boundary / 2.0;
  out.constants.a = r.a;
  out.constants.D = r.D;
  out.constants.C1 = r.C1;
  out.constants.p_star = r.p_star;
  out.constants.q_star = r.q_star;
  // Floor rho_ad^-(t) >= 1 + log_a g(t) on probes of the range used by h.
  const double ln_a = std::log(a);
  for (double t : log_grid(1e-6 * out.tau / D3, out.tau / D3, 32)) {
    if (!r.g.domain().contains(t)) continue;
    out.certificate.grid.push_back(t);
    out.certificate.margins.push_back(rinv(t) - 1.0 - r.g.log_value(t) / ln_a);
  }
  out.note = "rho cross-check gap " + format_double(rho_ad_cross_check(r));
  return out;
}

ImprovedBound admissible_improve(const DecreasingFn& g, const AdmissibilityEstimate& adm, double a,
                                 double dist_A_boundary) {
  return admissible_improve(admissible_rho(g, adm, a), dist_A_boundary);
}

LimitProbe limit_probe(const AdmissibleRho& r) {
  LimitProbe p;
  const double ln_a = std::log(r.a);
  for (int j = 0; j < 4; ++j) {
    const double t = std::pow(10.0, -6.0 - j);
    const double s = std::pow(t / r.C1, 1.0 / r.q_star);
    p.t.push_back(t);
    p.values.push_back(elasticity(r.g, s) / (r.q_star * ln_a));
  }
  const double first = std::abs(p.values.front()), last = std::abs(p.values.back());
  p.L = r.q_star * p.values.back();
  p.diverges = !std::isfinite(last) || (first == 0.0 ? last > 0.0 : last > 10.0 * first);
  return p;
}

ImprovedBound power_type_bound(const DecreasingFn& g, const AdmissibilityEstimate& adm, double a,
                               double dist_A_boundary) {
  const AdmissibleRho r = admissible_rho(g, adm, a);
  const LimitProbe probe = limit_probe(r);
  if (probe.diverges)
    throw LimitDiverges("L = -inf regime: t (mu_ad^-)'(t) moved from " + format_double(probe.values.front()) +
                        " to " + format_double(probe.values.back()) + " over three decades");
  const ImprovedBound adm_bound = admissible_improve(r, dist_A_boundary);
  const double tau = adm_bound.tau, ln_a = std::log(a), D3 = 3.0 * r.D;
  const auto grid = log_grid(1e-6 * tau, tau * (1.0 - 1.0 / kGridPoints), kGridPoints);

  // a g(v d) >= a^{rho^-(d/3D)}  iff  v d <= g^-(a^{rho^-(d/3D) - 1}).
  double v = 1.0;
  std::vector<double> levels;
  levels.reserve(grid.size());
  for (double d : grid) {
    const double level = (r.rho_ad_inv(d / D3) - 1.0) * ln_a;
    levels.push_back(level);
    v = std::min(v, sigma_of(g, level).value / d);
  }
  v *= 1.0 - 1e-9;
  if (!(v > 0.0)) throw LimitDiverges("no positive v dominates the admissible bound");

  ImprovedBound out;
  out.method = BoundMethod::PowerTypeClosed;
  out.h = [g, a, v](double d) { return a * g(v * d); };
  out.tau = tau;
  out.constants = adm_bound.constants;
  out.constants.v = v;
  out.certificate.grid = grid;
  for (std::size_t i = 0; i < grid.size(); ++i)
    out.certificate.margins.push_back(g.log_value(v * grid[i]) - levels[i]);
  out.note = "L = " + format_double(probe.L);
  return out;
}

double asymptotic_exponent(const DecreasingFn& g, const AdmissibilityEstimate& adm, double a, double t_lo,
                           double t_hi) {
  const auto* e = g.as<DecreasingFn::ExpPower>();
  if (!e) throw ArgumentError("asymptotic_exponent expects an exp-power profile");
  if (!(e->alpha < 1.0)) throw ArgumentError("asymptotic_exponent needs alpha < 1, got " + format_double(e->alpha));
  if (!(t_lo > 0.0 && t_hi > t_lo)) throw ArgumentError("asymptotic_exponent needs 0 < t_lo < t_hi");
  const AdmissibleRho r = admissible_rho(g, adm, a);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto ts = log_grid(t_lo, t_hi, 16);
  for (double t : ts) {
    const double x = -std::log(t), y = std::log(r.rho_ad_inv(t));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(ts.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------- output

std::string improved_bound_json(const ImprovedBound& b) {
  nlohmann::ordered_json j;
  j["method"] = method_name(b.method);
  j["tau"] = b.tau;
  nlohmann::ordered_json c = nlohmann::ordered_json::object();
  const auto put = [&](const char* name, double v) {
    if (!std::isnan(v)) c[name] = v;
  };
  const BoundConstants& k = b.constants;
  put("c1", k.c1);
  put("c2", k.c2);
  put("L", k.L);
  put("R", k.R);
  put("a", k.a);
  put("D", k.D);
  put("C1", k.C1);
  put("p_star", k.p_star);
  put("q_star", k.q_star);
  put("v", k.v);
  put("tau1", k.tau1);
  put("beta", k.beta);
  j["constants"] = c;
  if (!b.certificate.grid.empty()) {
    j["certificate"] = {{"points", b.certificate.grid.size()},
                        {"grid_lo", b.certificate.grid.front()},
                        {"grid_hi", b.certificate.grid.back()},
                        {"min_margin", b.certificate.min_margin()}};
  }
  if (!b.note.empty()) j["note"] = b.note;
  return j.dump(2);
}

void write_improved_bound_csv(const ImprovedBound& b, const std::vector<double>& d_grid, const std::string& path, const std::string& stamp) {
  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot write " + path);
  if (!stamp.empty()) os << stamp << '\n';
  os << "d,h\n";
  for (double d : d_grid) os << format_double(d) << ',' << format_double(b(d)) << '\n';
}

}  // namespace growthbound
