#include "growthbound/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <set>
#include <sstream>

#include "growthbound/measure.hpp"
#include "growthbound/rng.hpp"

namespace growthbound {

namespace {

using json = nlohmann::json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double kernel_eta(int k, double r) {
  if (r <= 0.0) return kInfinity;
  return k == 2 ? -std::log(r) : std::pow(r, 2.0 - k);
}

std::string fmt_point(const Point& x, int k) {
  std::string s = "(";
  for (int i = 0; i < k; ++i) s += (i ? ", " : "") + format_double(x[i]);
  return s + ")";
}

json point_json(const Point& x, int k) {
  json a = json::array();
  for (int i = 0; i < k; ++i) a.push_back(x[i]);
  return a;
}

// Non-finite doubles become strings so the JSON stays valid.
json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double bbox_diameter(const Region& omega) {
  Point lo, hi;
  omega.bounding_box(lo, hi);
  return distance(lo, hi);
}

}  // namespace

// ---------------------------------------------------------------- TestFunction

TestFunction TestFunction::kernel_sum(std::vector<double> weights, std::vector<Point> poles, int k) {
  if (weights.size() != poles.size()) throw ArgumentError("kernel sum needs one weight per pole");
  for (double w : weights)
    if (!(w > 0.0)) throw ArgumentError("kernel weights must be positive");
  if (k < 2 || k > kMaxDim) throw ArgumentError("kernel sum dimension must be 2 or 3");
  return TestFunction(KernelSum{std::move(weights), std::move(poles)}, k);
}

TestFunction TestFunction::log_modulus(std::vector<Point> zeros, std::vector<Point> poles, double log_scale) {
  if (!std::isfinite(log_scale)) throw ArgumentError("log scale must be finite");
  return TestFunction(LogModulus{std::move(zeros), std::move(poles), log_scale}, 2);
}

TestFunction TestFunction::custom(std::string label, std::function<double(const Point&)> fn, int k) {
  if (!fn) throw ArgumentError("custom test function needs a callable");
  return TestFunction(Custom{std::move(label), std::move(fn)}, k);
}

double TestFunction::operator()(const Point& x) const {
  double v = 0.0;
  if (const auto* ks = std::get_if<KernelSum>(&kind_)) {
    for (std::size_t j = 0; j < ks->poles.size(); ++j) v += ks->weights[j] * kernel_eta(k_, distance(x, ks->poles[j]));
  } else if (const auto* lm = std::get_if<LogModulus>(&kind_)) {
    double pos = lm->log_scale, neg = 0.0;
    for (const auto& z : lm->zeros) {
      const double r = distance(x, z);
      if (r == 0.0) return -kInfinity;
      pos += std::log(r);
    }
    for (const auto& p : lm->poles) {
      const double r = distance(x, p);
      if (r == 0.0) return kInfinity;
      neg += std::log(r);
    }
    v = pos - neg;
  } else {
    v = std::get<Custom>(kind_).fn(x);
  }
  return factor_ * v;
}

TestFunction TestFunction::scaled(double c) const {
  TestFunction t = *this;
  t.factor_ *= c;
  return t;
}

std::string TestFunction::type_name() const {
  if (std::holds_alternative<KernelSum>(kind_)) return "KernelSum";
  if (std::holds_alternative<LogModulus>(kind_)) return "LogModulus";
  return "Custom";
}

std::string TestFunction::describe() const {
  std::ostringstream os;
  if (const auto* ks = std::get_if<KernelSum>(&kind_)) {
    os << "KernelSum(k=" << k_ << ", poles=" << ks->poles.size() << ")";
  } else if (const auto* lm = std::get_if<LogModulus>(&kind_)) {
    os << "LogModulus(zeros=" << lm->zeros.size() << ", poles=" << lm->poles.size()
       << ", log_scale=" << format_double(lm->log_scale) << ")";
  } else {
    os << "Custom(" << std::get<Custom>(kind_).label << ")";
  }
  if (factor_ != 1.0) os << " x " << format_double(factor_);
  return os.str();
}

// ---------------------------------------------------------------- calibration

std::vector<Point> calibration_sample(const std::vector<Point>& points, double alpha, int k, long budget,
                                      std::uint64_t seed, const Region* within) {
  if (points.empty()) throw ArgumentError("calibration needs at least one point");
  if (!(alpha > 0.0)) throw ArgumentError("calibration radius must be positive");
  double reach = alpha;
  if (!std::isfinite(reach)) {
    if (!within) throw ArgumentError("an infinite calibration radius needs a region");
    reach = bbox_diameter(*within);
  }
  auto nearest = [&](const Point& x) {
    double d = kInfinity;
    for (const auto& p : points) d = std::min(d, distance(x, p));
    return d;
  };
  auto keep = [&](const Point& x) {
    const double d = nearest(x);
    return d > 0.0 && d < alpha && (!within || within->contains(x));
  };
  std::vector<Point> out;
  const long n_shell = budget / 3, n_uniform = budget / 3;

  // Shells: directions x log-spaced radii around every point.
  std::vector<Point> dirs;
  if (k == 2) {
    for (int i = 0; i < 96; ++i) {
      const double t = 2.0 * std::numbers::pi * (i + 0.5) / 96;
      dirs.push_back({std::cos(t), std::sin(t), 0.0});
    }
  } else {
    const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < 192; ++i) {
      const double zc = 1.0 - (2.0 * i + 1.0) / 192;
      const double rr = std::sqrt(1.0 - zc * zc);
      dirs.push_back({rr * std::cos(ga * i), rr * std::sin(ga * i), zc});
    }
  }
  const long per_point = std::max<long>(dirs.size(), n_shell / static_cast<long>(points.size()));
  const int n_radii = std::max<int>(8, static_cast<int>(per_point / static_cast<long>(dirs.size())));
  for (const auto& p : points)
    for (int j = 0; j < n_radii; ++j) {
      const double r = reach * std::pow(1e-9, 1.0 - (j + 0.5) / n_radii);
      for (const auto& d : dirs) {
        const Point x = p + r * d;
        if (keep(x)) out.push_back(x);
      }
    }

  // Uniform points of the reach-neighbourhood.
  Point lo = points.front(), hi = points.front();
  for (const auto& p : points)
    for (int i = 0; i < k; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  for (int i = 0; i < k; ++i) {
    lo[i] -= reach;
    hi[i] += reach;
  }
  if (within) {
    Point rlo, rhi;
    within->bounding_box(rlo, rhi);
    for (int i = 0; i < k; ++i) {
      lo[i] = std::max(lo[i], rlo[i]);
      hi[i] = std::min(hi[i], rhi[i]);
    }
  }
  Rng rng(derive_seed(seed, 1));
  std::vector<Point> uniform;
  for (long tries = 0; static_cast<long>(uniform.size()) < n_uniform && tries < 50 * n_uniform; ++tries) {
    Point x{};
    for (int i = 0; i < k; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * uniform01(rng);
    if (keep(x)) uniform.push_back(x);
  }
  out.insert(out.end(), uniform.begin(), uniform.end());

  // Bisector projections between the two nearest points.
  if (points.size() >= 2) {
    for (const auto& x : uniform) {
      std::size_t i1 = 0, i2 = 1;
      if (distance(x, points[1]) < distance(x, points[0])) std::swap(i1, i2);
      for (std::size_t j = 2; j < points.size(); ++j) {
        const double d = distance(x, points[j]);
        if (d < distance(x, points[i1])) {
          i2 = i1;
          i1 = j;
        } else if (d < distance(x, points[i2])) {
          i2 = j;
        }
      }
      const Point m = 0.5 * (points[i1] + points[i2]);
      Point n = points[i2] - points[i1];
      const double len = norm(n);
      if (len == 0.0) continue;
      n = (1.0 / len) * n;
      const Point y = x - dot(x - m, n) * n;
      const double dy = distance(y, points[i1]);
      bool ok = true;
      for (std::size_t j = 0; j < points.size() && ok; ++j)
        if (j != i1 && j != i2 && distance(y, points[j]) < dy) ok = false;
      if (ok && keep(y)) out.push_back(y);
    }
  }
  return out;
}

namespace {

double nearest_dist(const std::vector<Point>& pts, const Point& x) {
  double d = kInfinity;
  for (const auto& p : pts) d = std::min(d, distance(x, p));
  return d;
}

}  // namespace

Calibration calibrate_kernel(const std::vector<Point>& poles, const DecreasingFn& g, double alpha, int k, long budget,
                             std::uint64_t seed, const Region* within) {
  const auto sample = calibration_sample(poles, alpha, k, budget, seed, within);
  std::vector<double> u1(sample.size()), G(sample.size());
  double c = kInfinity;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (const auto& p : poles) u1[i] += kernel_eta(k, distance(sample[i], p));
    G[i] = eval_extended(g, nearest_dist(poles, sample[i]));
    if (u1[i] > 0.0) c = std::min(c, G[i] / u1[i]);
  }
  if (!std::isfinite(c)) throw CalibrationFailed("kernel is nowhere positive on the calibration sample");
  auto passes = [&](double cc) {
    for (std::size_t i = 0; i < sample.size(); ++i)
      if (cc * u1[i] > G[i]) return false;
    return true;
  };
  for (int step = 0; step < 64 && !passes(c); ++step) c = std::nextafter(c, 0.0);
  if (!passes(c) || c < 1e-6)
    throw CalibrationFailed("kernel weight " + format_double(c) + " is below 1e-6: g is too small against eta");
  Calibration cal;
  cal.c = c;
  cal.u = TestFunction::kernel_sum(std::vector<double>(poles.size(), c), poles, k);
  cal.samples = static_cast<long>(sample.size());
  cal.min_margin = kInfinity;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double m = G[i] - c * u1[i];
    if (m < cal.min_margin) {
      cal.min_margin = m;
      cal.witness = sample[i];
    }
  }
  return cal;
}

Calibration calibrate_log_modulus(const std::vector<Point>& zeros, const std::vector<Point>& poles,
                                  const DecreasingFn& g, double alpha, long budget, std::uint64_t seed,
                                  const Region* within) {
  if (poles.empty()) throw ArgumentError("log-modulus calibration needs a pole");
  const auto sample = calibration_sample(poles, alpha, 2, budget, seed, within);
  const auto base = TestFunction::log_modulus(zeros, poles, 0.0);
  std::vector<double> u0(sample.size()), G(sample.size());
  double s = kInfinity;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    u0[i] = base(sample[i]);
    G[i] = eval_extended(g, nearest_dist(poles, sample[i]));
    if (std::isfinite(u0[i])) s = std::min(s, G[i] - u0[i]);
  }
  if (!std::isfinite(s)) throw CalibrationFailed("log modulus is nowhere finite on the calibration sample");
  auto passes = [&](double ss) {
    for (std::size_t i = 0; i < sample.size(); ++i)
      if (ss + u0[i] > G[i]) return false;
    return true;
  };
  for (int step = 0; step < 64 && !passes(s); ++step) s = std::nextafter(s, -kInfinity);
  if (!passes(s)) throw CalibrationFailed("no log scale satisfies the hypothesis on the sample");
  Calibration cal;
  cal.c = s;
  cal.u = TestFunction::log_modulus(zeros, poles, s);
  cal.samples = static_cast<long>(sample.size());
  cal.min_margin = kInfinity;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double m = G[i] - (s + u0[i]);
    if (m < cal.min_margin) {
      cal.min_margin = m;
      cal.witness = sample[i];
    }
  }
  return cal;
}

// ---------------------------------------------------------------- grid checks

std::vector<double> node_values(const TestFunction& u, const Grid& grid) {
  std::vector<double> v(grid.size(), kNaN);
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid.kind(i) != Grid::Node::Ghost) v[i] = u(grid.node(i));
  return v;
}

SubharmonicReport test_function_subharmonic(const TestFunction& u, const Grid& grid, double pole_cells) {
  const int k = grid.dim();
  const double h = grid.spacing();
  std::vector<Point> poles;
  std::vector<std::pair<Point, double>> singular;  // point, |weight|
  if (const auto* ks = std::get_if<TestFunction::KernelSum>(&u.kind())) {
    poles = ks->poles;
    for (std::size_t j = 0; j < poles.size(); ++j) singular.emplace_back(poles[j], ks->weights[j]);
  } else if (const auto* lm = std::get_if<TestFunction::LogModulus>(&u.kind())) {
    poles = lm->poles;
    for (const auto& p : lm->poles) singular.emplace_back(p, 1.0);
    for (const auto& z : lm->zeros) singular.emplace_back(z, 1.0);
  } else {
    throw ArgumentError("sub-mean tolerance needs a kernel sum or log modulus");
  }
  const double ck = k == 2 ? 6.0 : 24.0;
  const double f = std::abs(u.factor());
  SubharmonicReport rep;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.kind(i) == Grid::Node::Ghost || !grid.has_stencil(i)) continue;
    const Point x = grid.node(i);
    if (!grid.region().contains(x)) continue;
    if (nearest_dist(poles, x) <= pole_cells * h) continue;
    double m4 = 0.0;
    for (const auto& [p, w] : singular) {
      const double r = distance(x, p) - h;
      m4 += r > 0.0 ? w * ck / std::pow(r, k + 2) : kInfinity;
    }
    const double tol = f * std::pow(h, 4) * m4 / 24.0;
    const double ux = u(x);
    double mean = 0.0;
    for (int a = 0; a < k; ++a) {
      const std::size_t s = grid.stride(a);
      mean += u(grid.node(i + s)) + u(grid.node(i - s));
    }
    mean /= 2 * k;
    ++rep.checked;
    const double excess = ux - mean;
    const double over = excess - tol - 1e-12 * std::max(1.0, std::abs(ux));
    if (over > 0.0 || std::isnan(excess)) {
      rep.violations.push_back(i);
      rep.max_excess = std::max(rep.max_excess, excess);
    }
  }
  return rep;
}

MarginReport hypothesis_check(const TestFunction& u, const DecreasingFn& g, const SetDescr& S, const Grid& grid,
                              double alpha) {
  MarginReport rep;
  rep.c_disc = 0.0;
  rep.allowance_formula = "none";
  rep.margins.assign(grid.size(), kNaN);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.kind(i) == Grid::Node::Ghost) continue;
    const Point x = grid.node(i);
    const double d = S.dist(x);
    if (!(d > 0.0 && d < alpha)) continue;
    const double ux = u(x);
    const double m = ux == -kInfinity ? kInfinity : eval_extended(g, d) - ux;
    rep.margins[i] = m;
    ++rep.compared;
    if (m < rep.min_margin || std::isnan(m)) {
      rep.min_margin = m;
      rep.witness = x;
    }
    if (m < 0.0 || std::isnan(m)) {
      ++rep.violations;
      if (!(-m <= worst)) {
        worst = -m;
        rep.worst_violation = x;
      }
    }
  }
  return rep;
}

MarginReport conclusion_check(const std::vector<double>& values, const std::vector<double>& F,
                              const ImprovedBound& h, const SetDescr& B, const Grid& grid, double c_disc,
                              double tau_factor) {
  MarginReport rep;
  rep.c_disc = c_disc;
  const double scale = c_disc * std::sqrt(grid.spacing() / grid.diameter());
  rep.allowance_formula = c_disc > 0.0 ? "allowance(x) = " + format_double(c_disc) + " * sqrt(h/diam) * F(x)" : "none";
  rep.margins.assign(grid.size(), kNaN);
  const double radius = tau_factor * h.tau;
  std::vector<std::size_t> idx;
  std::vector<double> dist;
  double dmin = kInfinity, dmax = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.kind(i) == Grid::Node::Ghost) continue;
    const double d = B.dist(grid.node(i));
    if (!(d > 0.0 && d < radius)) continue;
    idx.push_back(i);
    dist.push_back(d);
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  if (idx.empty()) return rep;
  const LowerStepTable table(h.h, dmin, dmax);
  double worst = 0.0;
  for (std::size_t n = 0; n < idx.size(); ++n) {
    const std::size_t i = idx[n];
    const double allow = F.empty() ? 0.0 : scale * std::abs(F[i]);
    double m = table(dist[n]) - values[i];
    if (!(m >= -allow)) m = table.exact(dist[n]) - values[i];
    rep.margins[i] = m;
    ++rep.compared;
    if (m < rep.min_margin || std::isnan(m)) {
      rep.min_margin = m;
      rep.witness = grid.node(i);
    }
    const double excess = -m - allow;
    if (excess > 0.0 || std::isnan(m)) {
      ++rep.violations;
      if (!(excess <= worst)) {
        worst = excess;
        rep.worst_violation = grid.node(i);
      }
    }
  }
  return rep;
}

MarginReport conclusion_check(const TestFunction& u, const ImprovedBound& h, const SetDescr& B, const Grid& grid,
                              double tau_factor) {
  return conclusion_check(node_values(u, grid), {}, h, B, grid, 0.0, tau_factor);
}

LowerStepTable::LowerStepTable(std::function<double(double)> f, double lo, double hi, int n) : f_(std::move(f)) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) return;
  t_ = log_grid(lo, hi, n);
  t_.front() = lo;
  t_.back() = hi;
  v_.reserve(t_.size());
  for (double t : t_) v_.push_back(f_(t));
}

double LowerStepTable::operator()(double t) const {
  if (t_.empty() || t < t_.front() || t > t_.back()) return f_(t);
  const auto it = std::lower_bound(t_.begin(), t_.end(), t);
  return v_[static_cast<std::size_t>(it - t_.begin())];
}

// ---------------------------------------------------------------- barrier

BarrierReport barrier_report(const DecreasingFn& g, const SetDescr& A, const ChartParams& params, const Point& anchor,
                             double r, long samples) {
  const double L = params.L;
  if (!(r > 0.0 && r < params.R / (8.0 * L)))
    throw ArgumentError("barrier radius must lie in (0, R/(8L)), got " + format_double(r));
  const int k = A.dim();
  if (A.dist(anchor) > 1e-6 * params.R) throw ArgumentError("barrier anchor " + fmt_point(anchor, k) + " is not on A");
  const LocalChart chart = local_chart(A, anchor, params);
  const double sc = chart.to_chart(anchor)[0];
  auto on_graph = [&](double s) {
    Point c{};
    c[0] = s;
    const Point ph = chart.phi_at(s);
    for (int i = 0; i < k - 1; ++i) c[i + 1] = ph[i];
    return chart.to_world(c);
  };
  BarrierReport rep;
  rep.anchor = anchor;
  rep.r = r;
  rep.y = on_graph(sc - r);
  rep.z = on_graph(sc + r);
  const double gr = eval_extended(g, r);
  const double tol = 1e-9 * r;
  const double cross = (4.0 * L + 2.0) * r;
  for (const auto& x : chart_domain_boundary(chart, sc, r, L, samples)) {
    ++rep.samples;
    const Point c = chart.to_chart(x);
    const Point ph = chart.phi_at(c[0]);
    double vert = 0.0;
    for (int i = 0; i < k - 1; ++i) vert += (c[i + 1] - ph[i]) * (c[i + 1] - ph[i]);
    vert = std::sqrt(vert);
    const double d = A.dist(x);
    const double sw = std::min(d - vert / (L + 1.0), vert - d);
    if (sw < rep.sandwich_margin) {
      rep.sandwich_margin = sw;
      rep.sandwich_witness = x;
    }
    const double dy = distance(x, rep.y), dz = distance(x, rep.z);
    const double cm = cross - std::max(dy, dz);
    if (cm < rep.cross_margin) {
      rep.cross_margin = cm;
      rep.cross_witness = x;
    }
    if (dy < 1e-3 * r || dz < 1e-3 * r) continue;
    ++rep.lemma_checked;
    const double gy = eval_extended(g, dy / (8.0 * L)), gz = eval_extended(g, dz / (8.0 * L));
    const double gd = eval_extended(g, d);
    const double lm = gy + gz - gr - gd;
    const double scale = 1e-12 * (std::abs(gy) + std::abs(gz) + std::abs(gr) + std::abs(gd));
    if (lm + scale < rep.lemma_margin) {
      rep.lemma_margin = lm + scale;
      rep.lemma_witness = x;
    }
  }
  rep.sandwich_ok = rep.sandwich_margin >= -tol;
  rep.cross_ok = rep.cross_margin >= -tol;
  rep.lemma_ok = rep.lemma_margin >= 0.0;
  if (!rep.sandwich_ok)
    rep.message = "chart sandwich fails at " + fmt_point(rep.sandwich_witness, k) + " (slack " +
                  format_double(rep.sandwich_margin) + ")";
  else if (!rep.lemma_ok)
    rep.message = "barrier inequality fails at " + fmt_point(rep.lemma_witness, k) + " (margin " +
                  format_double(rep.lemma_margin) + ")";
  else if (!rep.cross_ok)
    rep.message = "(4L+2)r bound fails at " + fmt_point(rep.cross_witness, k) + " (slack " +
                  format_double(rep.cross_margin) + ")";
  return rep;
}

BarrierReport barrier_check(const DecreasingFn& g, const SetDescr& A, const ChartParams& params, const Point& anchor,
                            double r, long samples) {
  BarrierReport rep = barrier_report(g, A, params, anchor, r, samples);
  if (!rep.pass()) throw BarrierViolation(rep.message);
  return rep;
}

// ---------------------------------------------------------------- scenario pieces

double scenario_cap(const Scenario& s, double spacing) { return eval_extended(s.g, spacing); }

std::function<double(const Point&)> scenario_obstacle(const Scenario& s, double cap) {
  const SetDescr S = SetDescr::union_of({s.A, s.B});
  const DecreasingFn g = s.g;
  const double alpha = s.alpha;
  const std::optional<double> outside = s.outside_value;
  return [S, g, alpha, outside, cap](const Point& x) {
    const double d = S.dist(x);
    if (outside && d >= alpha) return *outside;
    return std::min(eval_extended(g, d), cap);
  };
}

DomarPair domar_majorants(const Scenario& s, double spacing) {
  if (!s.domar) throw ConfigError("scenario " + s.name + " has no domar block");
  if (s.outside_value) throw ConfigError("domar bounds need the composed obstacle; drop outside_value");
  const DomarSpec& d = *s.domar;
  const bool constant = std::isfinite(d.constant);
  const double cap = constant ? d.constant : scenario_cap(s, spacing);
  const Majorant F = constant ? Majorant::custom("constant", [c = d.constant](const Point&) { return c; }, s.k)
                              : Majorant::custom("obstacle", scenario_obstacle(s, cap), s.k);
  const DistFn dist = distribution_function(F, s.omega, d.samples, {}, derive_seed(s.seed, 17));
  const SetDescr S = SetDescr::union_of({s.A, s.B});
  const double C_S = std::isnan(d.C)
                         ? admissibility_constant(S, d.p_star, default_probe_schedule(S), derive_seed(s.seed, 23)).C1()
                         : d.C;
  MuFunction mu;
  if (constant) {
    const double top = std::log(std::max(d.constant, 1.0)) / std::log(d.a) + 2.0;
    std::vector<double> nu_grid;
    for (int i = 1; i <= 64; ++i) nu_grid.push_back(top * i / 64.0);
    mu = mu_q_estimate(F, s.omega, d.p_star, d.a, nu_grid, default_ball_schedule(s.omega, 3, {}), derive_seed(s.seed, 19));
  } else {
    mu = mu_analytic(s.g, C_S, s.k - d.p_star, d.a, s.omega.inradius(), s.k);
  }
  return DomarPair{theorem_a(f1_transform(dist.f, d.a), s.k, d.eps, d.lambda, d.a),
                   theorem_b(mu, d.p_star, d.lambda, s.k), C_S, dist.max_finite, cap};
}

Comparison compare_bounds(const Scenario& s, int n) {
  if (!s.domar) throw ConfigError("compare needs a domar block");
  const DomarSpec& d = *s.domar;
  // Uncapped obstacle: a cap would freeze the Theorem A profile at the cap level.
  const DomarPair maj = domar_majorants(s, 0.0);
  const Point o = d.ray_origin;
  if (!s.omega.contains(o)) throw ConfigError("ray origin lies outside the region");
  Point dir = d.ray_direction;
  if (norm(dir) == 0.0) throw ConfigError("ray direction is zero");
  dir = (1.0 / norm(dir)) * dir;
  // Exit parameter of the ray.
  double t_in = 0.0, t_out = 1.0;
  while (s.omega.contains(o + t_out * dir)) t_out *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (t_in + t_out);
    (s.omega.contains(o + mid * dir) ? t_in : t_out) = mid;
  }
  const double d0 = s.omega.boundary_dist(o);
  Comparison c;
  c.resolved_level = maj.resolved_level;
  double d1 = 1e-4 * s.omega.inradius();
  const double level = 0.1 * maj.resolved_level;
  if (!std::isfinite(d.constant) && bound_A_at(d1, maj.A) > level) {
    // bound_A is non-increasing in the distance: bisect log d for the resolved end.
    if (bound_A_at(d0, maj.A) > level)
      throw ArgumentError("bound_A exceeds the sampled obstacle range at the ray origin; raise domar.samples");
    double lo = std::log(d1), hi = std::log(d0);
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      (bound_A_at(std::exp(mid), maj.A) > level ? lo : hi) = mid;
    }
    d1 = std::exp(hi);
  }
  c.stop_distance = d1;
  for (int j = 0; j < n; ++j) {
    const double target = d0 * std::pow(d1 / d0, static_cast<double>(j) / (n - 1));
    // Point on the ray with the target boundary distance (boundary distance decreases along it).
    double lo = 0.0, hi = t_in;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (s.omega.boundary_dist(o + mid * dir) > target ? lo : hi) = mid;
    }
    const Point x = o + lo * dir;
    CompareRow row;
    row.boundary_dist = s.omega.boundary_dist(x);
    row.bound_A = std::min(bound_A(x, s.omega, maj.A), maj.sup_F);
    row.bound_B = std::min(bound_B(x, s.omega, maj.B), maj.sup_F);
    row.ratio = row.bound_A / row.bound_B;
    c.rows.push_back(row);
  }
  c.ratio_increasing = true;
  int finite = 0;
  for (std::size_t j = 0; j < c.rows.size(); ++j) {
    if (!std::isfinite(c.rows[j].ratio)) break;
    ++finite;
    if (j > 0 && !(c.rows[j].ratio > c.rows[j - 1].ratio)) c.ratio_increasing = false;
  }
  if (finite < 3) c.ratio_increasing = false;
  return c;
}

void write_comparison_csv(const Comparison& c, const std::string& path, const std::string& stamp) {
  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot write " + path);
  if (!stamp.empty()) os << stamp << '\n';
  os << "dist,bound_A,bound_B,ratio\n";
  for (const auto& r : c.rows)
    os << format_double(r.boundary_dist) << ',' << format_double(r.bound_A) << ',' << format_double(r.bound_B) << ','
       << format_double(r.ratio) << '\n';
}

// ---------------------------------------------------------------- run_scenario

long Report::violations() const {
  long v = 0;
  for (const auto& a : assertions) v += a.passed ? 0 : std::max<long>(1, a.violations);
  return v;
}

namespace {

Assertion from_margins(const std::string& name, const MarginReport& m, const std::string& detail = "") {
  Assertion a;
  a.name = name;
  a.min_margin = m.min_margin;
  a.witness = m.violations > 0 ? m.worst_violation : m.witness;
  a.compared = m.compared;
  a.violations = m.violations;
  a.passed = m.violations == 0;
  a.detail = detail.empty() ? m.allowance_formula : detail;
  return a;
}

std::vector<Point> cloud_points(const SetDescr& B) {
  if (const auto* pc = std::get_if<SetDescr::PointCloud>(&B.shape())) return pc->points;
  throw ConfigError("a calibrated kernel needs B to be a point cloud, or explicit poles");
}

std::string tau_suffix(double f) {
  std::ostringstream os;
  os << ":tau_x" << format_double(f);
  return os.str();
}

struct Column {
  std::string name;
  std::vector<double> values;
};

void write_margins_csv(const std::string& path, const std::string& stamp, const Grid& grid,
                       const std::vector<Column>& cols) {
  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot write " + path);
  if (!stamp.empty()) os << stamp << '\n';
  const int k = grid.dim();
  const char* axes[] = {"x", "y", "z"};
  for (int a = 0; a < k; ++a) os << (a ? "," : "") << axes[a];
  for (const auto& c : cols) os << ',' << c.name;
  os << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.kind(i) == Grid::Node::Ghost) continue;
    const Point x = grid.node(i);
    for (int a = 0; a < k; ++a) os << (a ? "," : "") << format_double(x[a]);
    for (const auto& c : cols) {
      os << ',';
      if (!std::isnan(c.values[i])) os << format_double(c.values[i]);
    }
    os << '\n';
  }
}

}  // namespace

AdmissibilityEstimate scenario_admissibility(const Scenario& s) {
  if (!s.admissible) throw ConfigError("scenario " + s.name + " has no admissible block");
  const AdmissibleSpec& as = *s.admissible;
  return std::isnan(as.C) ? admissibility_constant(s.A, as.p_star, default_probe_schedule(s.A), derive_seed(s.seed, 29))
                          : admissibility_given(as.C, as.p_star, s.k);
}

double scenario_dist_A_boundary(const Scenario& s) {
  double d = kInfinity;
  for (const auto& p : s.A.sample(s.A.default_resolution())) d = std::min(d, s.omega.boundary_dist(p));
  return d;
}

std::vector<ImprovedBound> scenario_bounds(const Scenario& s, std::vector<std::string>& notes) {
  std::vector<ImprovedBound> out;
  if (s.lipschitz) {
    const LipschitzSpec& ls = *s.lipschitz;
    const ImprovedBound two = lipschitz_improve(s.g, ls.chart, s.k);
    out.push_back(two);
    if (ls.convexity) {
      try {
        out.push_back(convexity_upgrade(s.g, two, ls.beta));
      } catch (const UpgradeUnavailable& e) {
        notes.push_back(std::string("convexity upgrade unavailable: ") + e.what());
      }
    }
  }
  if (s.admissible) {
    const AdmissibleSpec& as = *s.admissible;
    const auto adm = scenario_admissibility(s);
    if (std::isnan(as.C))
      notes.push_back("admissibility constant of A estimated as " + format_double(adm.C_hat) + " (C1 " +
                      format_double(adm.C1()) + ")");
    const double dist_A_boundary = scenario_dist_A_boundary(s);
    const AdmissibleRho rho = admissible_rho(s.g, adm, as.a);
    out.push_back(admissible_improve(rho, dist_A_boundary));
    if (as.power_type) {
      try {
        out.push_back(power_type_bound(s.g, adm, as.a, dist_A_boundary));
      } catch (const LimitDiverges& e) {
        notes.push_back(std::string("power-type bound unavailable: ") + e.what());
      }
    }
  }
  return out;
}

Report run_scenario(const Scenario& s, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  Report rep;
  rep.scenario = s.name;
  rep.seed = s.seed;
  rep.k = s.k;
  rep.planted = s.planted;
  const int nodes = opts.grid_nodes > 0 ? opts.grid_nodes : s.grid.nodes;
  const Grid whole = Grid::over(s.omega, nodes);
  rep.grid_nodes = nodes;
  rep.spacing = whole.spacing();
  const double h = whole.spacing();
  const SetDescr S = SetDescr::union_of({s.A, s.B});
  const double cap = scenario_cap(s, h);
  const auto obstacle = scenario_obstacle(s, cap);
  std::vector<double> F(whole.size());
  for (std::size_t i = 0; i < whole.size(); ++i) F[i] = obstacle(whole.node(i));

  std::vector<Column> columns;
  std::vector<double> dist_S(whole.size()), dist_B(whole.size());
  for (std::size_t i = 0; i < whole.size(); ++i) {
    const Point x = whole.node(i);
    dist_S[i] = S.dist(x);
    dist_B[i] = s.B.dist(x);
  }
  columns.push_back({"dist_S", dist_S});
  columns.push_back({"dist_B", dist_B});
  columns.push_back({"F", F});

  // Test function.
  std::optional<TestFunction> u;
  const TestFunctionSpec& us = s.u;
  const std::uint64_t cal_seed = derive_seed(s.seed, 5);
  switch (us.kind) {
    case TestFunctionSpec::Kind::None:
      break;
    case TestFunctionSpec::Kind::CalibratedKernel: {
      const auto poles = us.poles.empty() ? cloud_points(s.B) : us.poles;
      const auto cal = calibrate_kernel(poles, s.g, s.alpha, s.k, us.budget, cal_seed, &s.omega);
      u = cal.u;
      rep.notes.push_back("calibrated kernel weight " + format_double(cal.c) + " on " + std::to_string(cal.samples) +
                          " samples, sample margin " + format_double(cal.min_margin));
      break;
    }
    case TestFunctionSpec::Kind::KernelSum:
      u = TestFunction::kernel_sum(us.weights, us.poles.empty() ? cloud_points(s.B) : us.poles, s.k);
      break;
    case TestFunctionSpec::Kind::LogModulus: {
      const auto poles = us.poles.empty() ? cloud_points(s.B) : us.poles;
      if (us.calibrate) {
        const auto cal = calibrate_log_modulus(us.zeros, poles, s.g, s.alpha, us.budget, cal_seed, &s.omega);
        u = cal.u;
        rep.notes.push_back("calibrated log scale " + format_double(cal.c) + " on " + std::to_string(cal.samples) +
                            " samples, sample margin " + format_double(cal.min_margin));
      } else {
        u = TestFunction::log_modulus(us.zeros, poles, us.log_scale);
      }
      break;
    }
  }
  if (u && us.scale != 1.0) u = u->scaled(us.scale);
  if (u) {
    rep.u_type = u->type_name();
    const auto hyp = hypothesis_check(*u, s.g, S, whole, s.alpha);
    rep.hypothesis_margin = hyp.min_margin;
    rep.hypothesis_witness = hyp.witness;
    rep.assertions.push_back(from_margins("hypothesis", hyp, "g(dist(x, A u B)) - u(x), no allowance"));
    const auto sub = test_function_subharmonic(*u, whole);
    Assertion a;
    a.name = "subharmonic:u";
    a.compared = sub.checked;
    a.violations = static_cast<long>(sub.violations.size());
    a.passed = sub.pass();
    a.min_margin = -sub.max_excess;
    if (!sub.violations.empty()) a.witness = whole.node(sub.violations.front());
    a.detail = "sub-mean property beyond the Taylor consistency bound, 2-cell pole neighbourhoods excluded";
    rep.assertions.push_back(a);
    columns.push_back({"u", node_values(*u, whole)});
  }

  // Improved bounds and barrier checks.
  rep.bounds = scenario_bounds(s, rep.notes);
  if (s.lipschitz) {
    const LipschitzSpec& ls = *s.lipschitz;
    for (std::size_t j = 0; j < ls.anchors.size(); ++j)
      for (int div : {16, 32}) {
        const double r = ls.chart.R / (div * ls.chart.L);
        const auto br = barrier_report(s.g, s.A, ls.chart, ls.anchors[j], r, ls.barrier_samples);
        Assertion a;
        a.name = "barrier:" + std::to_string(j) + ":R/" + std::to_string(div) + "L";
        a.passed = br.pass();
        a.compared = br.samples;
        a.violations = br.pass() ? 0 : 1;
        a.min_margin = std::min({br.lemma_margin, br.sandwich_margin, br.cross_margin});
        a.witness = br.pass() ? br.lemma_witness : (!br.sandwich_ok ? br.sandwich_witness
                                                     : !br.lemma_ok ? br.lemma_witness
                                                                    : br.cross_witness);
        a.detail = br.pass() ? "lemma margin " + format_double(br.lemma_margin) + ", sandwich slack " +
                                   format_double(br.sandwich_margin) + ", cross slack " +
                                   format_double(br.cross_margin)
                             : br.message;
        rep.assertions.push_back(a);
      }
  }

  // u against each bound.
  if (u)
    for (const auto& b : rep.bounds)
      rep.assertions.push_back(from_margins("conclusion:" + method_name(b.method), conclusion_check(*u, b, s.B, whole)));

  // Perron minorant, free near B, against each bound.
  PerronOptions po;
  po.tol = opts.tol > 0.0 ? opts.tol : s.grid.tol;
  po.relaxation = s.grid.over_relax ? optimal_relaxation(whole) : 1.0;
  auto record_run = [&](const std::string& mode, const PerronResult& r, double secs) {
    rep.perron.push_back({mode, r.iterations, r.residual, r.converged, r.active_fraction, secs});
    Assertion a;
    a.name = "perron_converged:" + mode;
    a.passed = r.converged;
    a.violations = r.converged ? 0 : 1;
    a.min_margin = r.tol - r.residual;
    a.detail = "residual " + format_double(r.residual) + " after " + std::to_string(r.iterations) + " sweeps";
    rep.assertions.push_back(a);
  };
  if (!rep.bounds.empty() || s.controls.corrupt_factor > 0.0) {
    Grid free = whole;
    free.free_near(s.B, h);
    const auto t1 = std::chrono::steady_clock::now();
    const PerronResult M = largest_subharmonic_minorant(F, free, po);
    record_run("free", M, seconds_since(t1));
    columns.push_back({"M_free", M.M});
    for (const auto& b : rep.bounds) {
      const std::string tag = method_name(b.method);
      rep.assertions.push_back(
          from_margins("perron_vs_h:" + tag, conclusion_check(M.M, M.F, b, s.B, free, s.grid.c_disc)));
      std::vector<double> col(whole.size(), kNaN);
      const double radius = std::max(1.0, s.controls.tau_factor) * b.tau;
      for (std::size_t i = 0; i < whole.size(); ++i)
        if (whole.kind(i) != Grid::Node::Ghost && dist_B[i] > 0.0 && dist_B[i] < radius) col[i] = b.h(dist_B[i]);
      columns.push_back({"h:" + tag, std::move(col)});
      if (s.controls.tau_factor > 1.0)
        rep.assertions.push_back(from_margins(
            "perron_vs_h:" + tag + tau_suffix(s.controls.tau_factor),
            conclusion_check(M.M, M.F, b, s.B, free, s.grid.c_disc, s.controls.tau_factor)));
    }
    if (s.controls.corrupt_factor > 0.0) {
      const double f = s.controls.corrupt_factor;
      const DecreasingFn g = s.g;
      const SetDescr B = s.B;
      auto bound = [&](const Point& x) { return f * eval_extended(g, B.dist(x)); };
      auto where = [&](const Point& x) { return B.dist(x) > 0.0; };
      rep.assertions.push_back(from_margins("perron_vs_corrupted_bound", perron_vs_bound(M, free, bound, where, s.grid.c_disc),
                                            "bound " + format_double(f) + " g(dist(x, B))"));
    }
  }

  // Domar majorants against the minorant over the whole region.
  if (s.domar) {
    const DomarPair maj = domar_majorants(s, h);
    rep.notes.push_back("Theorem B uses admissibility constant " + format_double(maj.C_S) + " for A u B");
    const auto t1 = std::chrono::steady_clock::now();
    const PerronResult M = largest_subharmonic_minorant(F, whole, po);
    record_run("whole", M, seconds_since(t1));
    columns.push_back({"M_whole", M.M});
    double bmin = kInfinity, bmax = 0.0;
    std::vector<double> bd(whole.size(), kNaN);
    for (std::size_t i = 0; i < whole.size(); ++i) {
      if (whole.kind(i) == Grid::Node::Ghost) continue;
      const Point x = whole.node(i);
      if (!s.omega.contains(x)) continue;
      bd[i] = s.omega.boundary_dist(x);
      bmin = std::min(bmin, bd[i]);
      bmax = std::max(bmax, bd[i]);
    }
    const LowerStepTable tA([&maj](double d) { return bound_A_at(d, maj.A); }, bmin, bmax);
    const LowerStepTable tB([&maj](double d) { return bound_B_at(d, maj.B); }, bmin, bmax);
    std::vector<double> colA(whole.size(), kNaN), colB(whole.size(), kNaN);
    for (std::size_t i = 0; i < whole.size(); ++i)
      if (!std::isnan(bd[i])) {
        colA[i] = tA(bd[i]);
        colB[i] = tB(bd[i]);
      }
    auto compare_col = [&](const std::string& name, const std::vector<double>& col,
                           const std::function<double(double)>& exact) {
      MarginReport mr;
      mr.c_disc = s.grid.c_disc;
      const double scale = s.grid.c_disc * std::sqrt(h / whole.diameter());
      mr.allowance_formula = "allowance(x) = " + format_double(s.grid.c_disc) + " * sqrt(h/diam) * F(x)";
      double worst = 0.0;
      for (std::size_t i = 0; i < whole.size(); ++i) {
        if (std::isnan(col[i])) continue;
        double m = std::isinf(col[i]) ? kInfinity : col[i] - M.M[i];
        if (!(m >= -scale * std::abs(M.F[i]))) m = exact(bd[i]) - M.M[i];
        ++mr.compared;
        if (m < mr.min_margin) {
          mr.min_margin = m;
          mr.witness = whole.node(i);
        }
        const double excess = -m - scale * std::abs(M.F[i]);
        if (excess > 0.0) {
          ++mr.violations;
          if (excess > worst) {
            worst = excess;
            mr.worst_violation = whole.node(i);
          }
        }
      }
      rep.assertions.push_back(from_margins(name, mr));
    };
    compare_col("perron_vs_bound_A", colA, [&tA](double t) { return tA.exact(t); });
    compare_col("perron_vs_bound_B", colB, [&tB](double t) { return tB.exact(t); });
    columns.push_back({"bound_A", std::move(colA)});
    columns.push_back({"bound_B", std::move(colB)});
  }

  // Planted versus observed failures.
  std::set<std::string> failed, planted(s.planted.begin(), s.planted.end());
  for (const auto& a : rep.assertions)
    if (!a.passed) failed.insert(a.name);
  for (const auto& f : failed)
    if (!planted.count(f)) rep.unexpected.push_back(f);
  for (const auto& p : planted)
    if (!failed.count(p)) rep.missing.push_back(p);
  rep.seconds = seconds_since(t0);

  if (!opts.out_dir.empty()) {
    const std::filesystem::path dir = std::filesystem::path(opts.out_dir) / s.name;
    std::filesystem::create_directories(dir);
    write_margins_csv((dir / "margins.csv").string(), opts.stamp, whole, columns);
    std::ofstream((dir / "report.json").string()) << report_json(rep, s) << '\n';
    std::ofstream((dir / "report.txt").string()) << report_text(rep);
  }
  return rep;
}

std::string report_json(const Report& r, const Scenario& s) {
  json j;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["dim"] = r.k;
  j["grid"] = {{"nodes", r.grid_nodes}, {"spacing", r.spacing}};
  j["u_type"] = r.u_type;
  j["hypothesis"] = {{"min_margin", num(r.hypothesis_margin)}, {"witness", point_json(r.hypothesis_witness, r.k)}};
  json bounds = json::array();
  for (const auto& b : r.bounds) bounds.push_back(json::parse(improved_bound_json(b)));
  j["bounds"] = bounds;
  json perron = json::array();
  for (const auto& p : r.perron)
    perron.push_back({{"mode", p.mode},
                      {"iterations", p.iterations},
                      {"residual", num(p.residual)},
                      {"converged", p.converged},
                      {"active_fraction", p.active_fraction},
                      {"seconds", p.seconds}});
  j["perron"] = perron;
  json as = json::array();
  for (const auto& a : r.assertions)
    as.push_back({{"name", a.name},
                  {"passed", a.passed},
                  {"min_margin", num(a.min_margin)},
                  {"witness", point_json(a.witness, r.k)},
                  {"compared", a.compared},
                  {"violations", a.violations},
                  {"detail", a.detail}});
  j["assertions"] = as;
  j["planted"] = r.planted;
  j["unexpected"] = r.unexpected;
  j["missing"] = r.missing;
  j["notes"] = r.notes;
  j["pass"] = r.pass();
  j["seconds"] = r.seconds;
  j["config"] = s.resolved_json.empty() ? json::object() : json::parse(s.resolved_json);
  return j.dump(2);
}

std::string report_text(const Report& r) {
  std::ostringstream os;
  os << "scenario " << r.scenario << " (k=" << r.k << ", grid " << r.grid_nodes << ", h=" << format_double(r.spacing)
     << ", seed " << r.seed << ")\n";
  if (!r.u_type.empty())
    os << "  u: " << r.u_type << ", hypothesis margin " << format_double(r.hypothesis_margin) << '\n';
  for (const auto& b : r.bounds) os << "  bound " << method_name(b.method) << ", tau " << format_double(b.tau) << '\n';
  for (const auto& p : r.perron)
    os << "  perron " << p.mode << ": " << p.iterations << " sweeps, residual " << format_double(p.residual)
       << (p.converged ? "" : " (not converged)") << '\n';
  for (const auto& a : r.assertions) {
    os << "  " << (a.passed ? "ok   " : "FAIL ") << a.name << "  min margin " << format_double(a.min_margin) << ", "
       << a.violations << "/" << a.compared << " violations";
    if (!a.passed) os << ", witness " << fmt_point(a.witness, r.k);
    os << '\n';
  }
  for (const auto& n : r.notes) os << "  note: " << n << '\n';
  os << "  planted " << r.planted.size() << ", unexpected " << r.unexpected.size() << ", missing " << r.missing.size()
     << " -> " << (r.pass() ? "PASS" : "FAIL") << '\n';
  return os.str();
}

}  // namespace growthbound
