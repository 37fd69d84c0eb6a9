#include "growthbound/domar.hpp"

#include <algorithm>
#include <fstream>

#include "growthbound/quadrature.hpp"

namespace growthbound {

double DomarConstants::feasibility(double d) const {
  return a / (std::pow(d, exponent) * S1) + std::pow(a, -static_cast<double>(lambda));
}

double DomarConstants::S_R(double R) const { return S1 * std::pow(R, k); }

DomarConstants choose_constants(double a, double exponent, int lambda, int k) {
  if (!(a > 1.0)) throw ArgumentError("Domar constants need a > 1");
  if (!(exponent > 0.0)) throw ArgumentError("Domar constants need a positive exponent");
  if (lambda < 1) throw ArgumentError("lambda must be a positive integer");
  DomarConstants c;
  c.a = a;
  c.exponent = exponent;
  c.lambda = lambda;
  c.k = k;
  c.S1 = unit_ball_volume(k);
  c.D = std::pow(a / (c.S1 * (1.0 - std::pow(a, -static_cast<double>(lambda)))), 1.0 / exponent);
  // Step up to the first double that satisfies the inequality in floating point.
  while (c.feasibility(c.D) > 1.0) c.D = std::nextafter(c.D, kInfinity);
  return c;
}

double power_of_a(double a, double e) {
  const double x = e * std::log(a);
  if (x > 700.0) return kInfinity;
  return std::exp(x);
}

DecreasingFn delta_fn(int k, double eps, int lambda) {
  if (k < 2) throw ArgumentError("delta needs k >= 2");
  if (!(eps > 0.0)) throw ArgumentError("delta needs eps > 0");
  const double lam1 = lambda + 1.0;
  const double pre = lam1 * std::pow((k - 1.0) / eps, (k - 1.0) / k);
  const double p = eps / k;
  DecreasingFn::Custom c;
  c.label = "delta";
  c.value = [=](double t) { return pre * std::pow(t - lam1, -p); };
  c.deriv = [=](double t) { return -p * pre * std::pow(t - lam1, -p - 1.0); };
  c.log_value = [=](double t) { return std::log(pre) - p * std::log(t - lam1); };
  c.limit_hi = 0.0;
  return DecreasingFn::custom(std::move(c), Interval{lam1, kInfinity, false, false});
}

namespace {

/// J(x) = int_x^inf f1(u) m u^{m-1} du on x >= 1, from cumulative panel sums.
struct TailTable {
  std::function<double(double)> integrand;
  std::vector<double> nodes;  // x_0 = 1 < x_1 < ...
  std::vector<double> J;      // J at nodes

  double operator()(double x) const {
    if (x >= nodes.back()) {
      if (J.back() == 0.0) return 0.0;
      return quad::tail(integrand, x, 1e-11);
    }
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - nodes.begin());  // nodes[j-1] <= x < nodes[j]
    const double w = nodes[j] - x;
    if (w < 1e-6 * (nodes[j] - nodes[j - 1])) return J[j] + 0.5 * w * (integrand(x) + integrand(nodes[j]));
    return J[j] + quad::adaptive(integrand, x, nodes[j], 1e-11);
  }
};

std::shared_ptr<TailTable> build_tail_table(const DecreasingFn& f1, double m) {
  auto tab = std::make_shared<TailTable>();
  tab->integrand = [f1, m](double u) {
    const double v = eval_extended(f1, u);
    return v == 0.0 ? 0.0 : v * m * std::pow(u, m - 1.0);
  };
  std::vector<double> panels;
  double x = 1.0;
  tab->nodes.push_back(x);
  double sum = 0.0;
  int small_run = 0;
  for (int j = 0; j < 2000; ++j) {
    const double next = x * std::pow(2.0, 0.125);
    const double p = quad::adaptive(tab->integrand, x, next, 1e-12);
    panels.push_back(p);
    tab->nodes.push_back(next);
    sum += p;
    x = next;
    const bool zero_beyond = p == 0.0 && tab->integrand(next) == 0.0;
    if (zero_beyond || p < 1e-17 * sum) {
      if (++small_run >= 8) break;
    } else {
      small_run = 0;
    }
    if (x > 1e12) break;
  }
  const double top = tab->integrand(x) == 0.0 && panels.back() == 0.0 ? 0.0 : quad::tail(tab->integrand, x, 1e-11);
  tab->J.assign(tab->nodes.size(), 0.0);
  tab->J.back() = top;
  for (std::size_t j = panels.size(); j-- > 0;) tab->J[j] = tab->J[j + 1] + panels[j];
  return tab;
}

}  // namespace

DecreasingFn psi_fn(const DecreasingFn& f1, int k, double eps, int lambda) {
  if (k < 2) throw ArgumentError("psi needs k >= 2");
  if (!(eps > 0.0)) throw ArgumentError("psi needs eps > 0");
  const double m = k - 1.0 + eps;
  auto table = build_tail_table(f1, m);
  const double lam = lambda;
  DecreasingFn::Custom c;
  c.label = "psi";
  c.value = [=](double t) {
    const double x = t - lam;
    const double f = eval_extended(f1, x);
    const double inner = (*table)(x) + (f == 0.0 ? 0.0 : std::pow(x, m) * f);
    return std::pow(std::max(inner, 0.0), 1.0 / k);
  };
  c.limit_hi = 0.0;
  return DecreasingFn::custom(std::move(c), Interval{lam + 1.0, kInfinity, false, false});
}

double level_inverse(const std::function<double(double)>& f, double lo, double s) {
  // Bracket: find hi with f(hi) <= s by growing the offset from lo.
  double off = 1.0;
  double hi = lo + off;
  while (!(f(hi) <= s)) {
    off *= 2.0;
    hi = lo + off;
    if (off > 1e300) return kInfinity;
  }
  const double first = std::nextafter(lo, kInfinity);
  if (f(first) <= s) return lo;
  return bisect_doubles(first, hi, [&](double t) { return f(t) <= s; });
}

TheoremAMajorant theorem_a(const DecreasingFn& f1, int k, double eps, int lambda, double a) {
  TheoremAMajorant maj{eps, k, lambda, choose_constants(a, k, lambda, k), f1, delta_fn(k, eps, lambda),
                       psi_fn(f1, k, eps, lambda), f1, f1};
  const auto delta = maj.delta;
  const auto psi = maj.psi;
  const double lam1 = lambda + 1.0;
  DecreasingFn::Custom phi;
  phi.label = "phi";
  phi.value = [delta, psi](double t) {
    const double p = psi(t);
    return p == 0.0 ? 0.0 : delta(t) * p;
  };
  phi.limit_hi = 0.0;
  maj.phi = DecreasingFn::custom(std::move(phi), Interval{lam1, kInfinity, false, false});
  const auto phi_fn = maj.phi;
  DecreasingFn::Custom inv;
  inv.label = "phi_inv";
  inv.value = [phi_fn, lam1](double s) { return level_inverse([&](double t) { return phi_fn(t); }, lam1, s); };
  inv.limit_hi = lam1;
  maj.phi_inv = DecreasingFn::custom(std::move(inv), Interval{0.0, kInfinity, false, false});
  return maj;
}

double bound_A_at(double boundary_distance, const TheoremAMajorant& maj) {
  if (!(boundary_distance > 0.0)) return kInfinity;
  return power_of_a(maj.constants.a, maj.phi_inv(boundary_distance / maj.constants.D));
}

double bound_A(const Point& x, const Region& omega, const TheoremAMajorant& maj) {
  return bound_A_at(omega.boundary_dist(x), maj);
}

// ---------------------------------------------------------------- Theorem B

MuFunction mu_analytic(const DecreasingFn& g, double C1, double q_star, double a, double inradius, int k) {
  if (!(C1 > 0.0) || !(q_star > 0.0) || !(a > 1.0)) throw ArgumentError("mu_analytic: bad constants");
  const double ln_a = std::log(a);
  const double cap = std::isfinite(inradius) ? unit_ball_volume(k) * std::pow(inradius, q_star) : kInfinity;
  const double c = std::pow(C1, 1.0 / q_star);
  const DecreasingFn ginv = gen_inverse(g);
  MuFunction out;
  out.q_star = q_star;
  out.a = a;
  out.source = "analytic";
  DecreasingFn::Custom mu;
  mu.label = "mu_analytic";
  mu.value = [=](double nu) {
    const double level = nu * ln_a;
    double sigma;
    if (level > 700.0) {
      sigma = g.log_level_inverse(level);
    } else {
      const double y = std::exp(level);
      sigma = y > ginv.domain().lo || (y == ginv.domain().lo && ginv.domain().lo_closed) ? ginv(y) : g.domain().hi;
    }
    return std::min(C1 * std::pow(sigma, q_star), cap);
  };
  mu.limit_hi = 0.0;
  out.mu = DecreasingFn::custom(std::move(mu), Interval{0.0, kInfinity, false, false});
  const double cap_root = std::isfinite(cap) ? std::pow(cap, 1.0 / q_star) : kInfinity;
  out.inv_root = [=](double u) {
    if (u >= cap_root) return 0.0;
    const double r = u / c;
    const Interval& d = g.domain();
    double lg;
    if (r > d.lo && (r < d.hi || (r == d.hi && d.hi_closed))) {
      lg = g.log_value(r);
    } else {
      const double v = eval_extended(g, r);
      lg = v > 0.0 ? std::log(v) : -kInfinity;
    }
    return std::max(0.0, lg / ln_a);
  };
  if (std::isfinite(cap_root)) out.u_breaks.push_back(cap_root);
  return out;
}

BallSchedule default_ball_schedule(const Region& omega, int per_axis, const std::vector<Point>& extra) {
  BallSchedule s;
  Point lo, hi;
  omega.bounding_box(lo, hi);
  const int k = omega.dim();
  const int total = static_cast<int>(std::pow(per_axis, k));
  for (int idx = 0; idx < total; ++idx) {
    Point c{};
    int rem = idx;
    for (int i = 0; i < k; ++i) {
      c[i] = lo[i] + (hi[i] - lo[i]) * (rem % per_axis + 0.5) / per_axis;
      rem /= per_axis;
    }
    if (omega.contains(c)) s.centers.push_back(c);
  }
  for (const auto& p : extra)
    if (omega.contains(p)) s.centers.push_back(p);
  return s;
}

MuFunction mu_q_estimate(const Majorant& F, const Region& omega, double p_star, double a,
                         const std::vector<double>& nu_grid, const BallSchedule& schedule, std::uint64_t seed) {
  const int k = omega.dim();
  if (!(p_star > 0.0 && p_star < k)) throw ArgumentError("mu estimate needs 0 < p_star < k");
  if (!(a > 1.0)) throw ArgumentError("mu estimate needs a > 1");
  if (nu_grid.size() < 2) throw ArgumentError("mu estimate needs at least two nu nodes");
  for (std::size_t i = 0; i < nu_grid.size(); ++i)
    if (!(nu_grid[i] > 0.0) || (i && !(nu_grid[i] > nu_grid[i - 1])))
      throw ArgumentError("nu grid must be positive and strictly increasing");
  if (schedule.centers.empty()) throw ArgumentError("mu estimate needs at least one ball centre");
  const double q_star = k - p_star;
  std::vector<double> levels;
  for (double nu : nu_grid) levels.push_back(std::exp(nu * std::log(a)));
  std::vector<double> best(nu_grid.size(), 0.0);
  std::uint64_t ball = 0;
  for (const auto& x : schedule.centers) {
    const double dx = omega.boundary_dist(x);
    for (double frac : schedule.fractions) {
      const double R = dx * frac * (1.0 - 1e-9);
      if (!(R > 0.0)) continue;
      Rng rng(derive_seed(seed, ball++));
      std::vector<double> vals;
      vals.reserve(static_cast<std::size_t>(schedule.samples_per_ball));
      for (long i = 0; i < schedule.samples_per_ball; ++i) vals.push_back(F.capped(uniform_in_ball(rng, x, R, k)));
      std::sort(vals.begin(), vals.end());
      const double ball_vol = unit_ball_volume(k) * std::pow(R, k);
      for (std::size_t j = 0; j < levels.size(); ++j) {
        const auto it = std::lower_bound(vals.begin(), vals.end(), levels[j]);
        const double share = static_cast<double>(vals.end() - it) / static_cast<double>(vals.size());
        best[j] = std::max(best[j], ball_vol * share / std::pow(R, p_star));
      }
    }
  }
  best = isotonic_nonincreasing(best);
  // Right-continuous step: value best[j] on [nu_j, nu_{j+1}).
  std::vector<DecreasingFn::Knot> knots;
  for (std::size_t j = 0; j < nu_grid.size(); ++j) {
    if (j) knots.push_back({nu_grid[j], best[j - 1]});
    knots.push_back({nu_grid[j], best[j]});
  }
  knots.push_back({2.0 * nu_grid.back(), best.back()});
  MuFunction out;
  out.q_star = q_star;
  out.a = a;
  out.source = "estimated";
  out.mu = DecreasingFn::tabulated(knots, Interval{0.0, kInfinity, false, false}, true);
  // mu^-(s) = inf{nu : mu(nu) <= s}: the first grid node whose value is <= s (0 below the grid).
  const std::vector<double> grid = nu_grid;
  const std::vector<double> vals = best;
  out.inv_root = [grid, vals, q_star](double u) {
    const double s = std::pow(u, q_star);
    if (vals.front() <= s) return 0.0;
    for (std::size_t j = 1; j < grid.size(); ++j)
      if (vals[j] <= s) return grid[j];
    return kInfinity;
  };
  for (double v : best)
    if (v > 0.0) out.u_breaks.push_back(std::pow(v, 1.0 / q_star));
  std::sort(out.u_breaks.begin(), out.u_breaks.end());
  out.u_breaks.erase(std::unique(out.u_breaks.begin(), out.u_breaks.end()), out.u_breaks.end());
  return out;
}

namespace {

/// int_0^U mu^-(u^{q*}) du, split at the known discontinuities.
double inv_root_integral(const MuFunction& mu, double U) {
  if (!(U > 0.0)) return 0.0;
  double total = 0.0;
  double left = 0.0;
  auto piece = [&](double l, double r) {
    if (r <= l) return;
    const double v = quad::finite(mu.inv_root, l, r, 1e-12);
    total += v;
  };
  for (double b : mu.u_breaks) {
    if (b >= U) break;
    if (b <= left) continue;
    piece(left, b);
    left = b;
  }
  piece(left, U);
  return total;
}

}  // namespace

double q_cond2_probe(const MuFunction& mu) {
  if (!std::isfinite(mu.inv_root(1e-300)))
    throw DivergentIntegral("mu does not vanish on its nu-grid, so mu^- is unbounded near 0");
  // Dyadic panels [2^-j-1, 2^-j] of int_0^1 mu^-(u^q) du.
  double sum = 0.0, prev = 0.0;
  int flat = 0, small = 0;
  for (int j = 0; j < 1000; ++j) {
    const double hi = std::ldexp(1.0, -j), lo = std::ldexp(1.0, -j - 1);
    double p = 0.0;
    double l = lo;
    for (double b : mu.u_breaks) {
      if (b <= l || b >= hi) continue;
      p += quad::finite(mu.inv_root, l, b, 1e-10);
      l = b;
    }
    p += quad::finite(mu.inv_root, l, hi, 1e-10);
    if (!std::isfinite(p)) throw DivergentIntegral("mu^- is not integrable near 0");
    sum += p;
    if (j > 4 && prev > 0.0 && p >= 0.999 * prev) {
      if (++flat >= 5) throw DivergentIntegral("int_0^1 mu^-(s) ds^(1/q*) diverges: dyadic panels stop shrinking");
    } else {
      flat = 0;
    }
    if (p <= 1e-15 * sum) {
      if (++small >= 3) return sum;
    } else {
      small = 0;
    }
    prev = p;
  }
  throw DivergentIntegral("int_0^1 mu^-(s) ds^(1/q*) did not settle");
}

DecreasingFn rho_fn(const MuFunction& mu, int lambda) {
  if (lambda < 1) throw ArgumentError("lambda must be a positive integer");
  q_cond2_probe(mu);
  const double lam = lambda;
  DecreasingFn::Custom c;
  c.label = "rho";
  c.value = [mu, lam](double t) {
    const double m = mu.mu(t - lam);
    if (!(m > 0.0)) return 0.0;
    const double U = std::pow(m, 1.0 / mu.q_star);
    const double v = inv_root_integral(mu, U) - (t - 1.0 - lam) * U;
    return std::max(v, 0.0);
  };
  c.limit_hi = 0.0;
  return DecreasingFn::custom(std::move(c), Interval{lam, kInfinity, false, false});
}

TheoremBMajorant theorem_b(const MuFunction& mu, double p_star, int lambda, int k) {
  if (!(p_star > 0.0 && p_star < k)) throw ArgumentError("Theorem B needs 0 < p_star < k");
  const double q_star = k - p_star;
  if (std::abs(q_star - mu.q_star) > 1e-12) throw ArgumentError("mu was built for a different q*");
  const DecreasingFn rho = rho_fn(mu, lambda);
  const double lam = lambda;
  DecreasingFn::Custom inv;
  inv.label = "rho_inv";
  inv.value = [rho, lam](double s) { return level_inverse([&](double t) { return rho(t); }, lam, s); };
  inv.limit_hi = lam;
  return TheoremBMajorant{p_star, q_star, lambda, choose_constants(mu.a, q_star, lambda, k), mu, rho,
                          DecreasingFn::custom(std::move(inv), Interval{0.0, kInfinity, false, false})};
}

double bound_B_at(double boundary_distance, const TheoremBMajorant& maj) {
  if (!(boundary_distance > 0.0)) return kInfinity;
  return power_of_a(maj.constants.a, maj.rho_inv(boundary_distance / maj.constants.D));
}

double bound_B(const Point& x, const Region& omega, const TheoremBMajorant& maj) {
  return bound_B_at(omega.boundary_dist(x), maj);
}

void write_theorem_a_csv(const TheoremAMajorant& maj, const std::vector<double>& t_grid, const std::string& path, const std::string& stamp) {
  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot write " + path);
  if (!stamp.empty()) os << stamp << '\n';
  os << "t,delta,psi,phi\n";
  for (double t : t_grid)
    os << format_double(t) << ',' << format_double(maj.delta(t)) << ',' << format_double(maj.psi(t)) << ','
       << format_double(maj.phi(t)) << '\n';
}

void write_theorem_b_csv(const TheoremBMajorant& maj, const std::vector<double>& nu_grid, const std::string& path, const std::string& stamp) {
  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot write " + path);
  if (!stamp.empty()) os << stamp << '\n';
  os << "nu,mu,rho\n";
  for (double nu : nu_grid)
    os << format_double(nu) << ',' << format_double(maj.mu.mu(nu)) << ','
       << format_double(nu > maj.lambda ? maj.rho(nu) : kInfinity) << '\n';
}

}  // namespace growthbound
