#include "growthbound/measure.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

namespace growthbound {

// ---------------------------------------------------------------- Majorant

double eval_extended(const DecreasingFn& g, double t) {
  const Interval& d = g.domain();
  if (t < d.lo || (t == d.lo && !d.lo_closed)) return d.lo_closed ? g(d.lo) : kInfinity;
  if (t > d.hi || (t == d.hi && !d.hi_closed)) return d.hi_closed ? g(d.hi) : std::max(0.0, g.limit_hi());
  return g(t);
}

Majorant Majorant::composed(const DecreasingFn& g, const SetDescr& s) { return Majorant(Composed{g, s}, s.dim()); }

Majorant Majorant::grid(const Point& lo, const Point& hi, std::array<int, 3> nodes, std::vector<double> values,
                        int k) {
  std::size_t total = 1;
  for (int i = 0; i < 3; ++i) {
    if (i >= k) nodes[i] = 1;
    if (nodes[i] < 1 || (i < k && nodes[i] < 2)) throw ArgumentError("grid majorant needs at least 2 nodes per axis");
    if (i < k && !(hi[i] > lo[i])) throw ArgumentError("grid majorant box is degenerate");
    total *= static_cast<std::size_t>(nodes[i]);
  }
  if (values.size() != total) throw ArgumentError("grid majorant value count does not match the lattice");
  for (double v : values)
    if (!(v >= 0.0)) throw ArgumentError("majorant values must be nonnegative");
  return Majorant(Grid{lo, hi, nodes, std::move(values)}, k);
}

Majorant Majorant::product(const DecreasingFn& profile, int q, const Point& center, int k) {
  if (q < 1 || q > k) throw ArgumentError("product majorant needs 1 <= q <= k");
  return Majorant(Product{profile, q, center}, k);
}

Majorant Majorant::custom(std::string label, std::function<double(const Point&)> fn, int k) {
  return Majorant(Custom{std::move(label), std::move(fn)}, k);
}

Majorant Majorant::with_cap(double cap) const {
  if (!(cap > 0.0)) throw ArgumentError("majorant cap must be positive");
  Majorant m = *this;
  m.cap_ = cap;
  return m;
}

double Majorant::operator()(const Point& x) const {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Composed>) {
          const double d = s.set.dist(x);
          return d == 0.0 ? kInfinity : eval_extended(s.g, d);
        } else if constexpr (std::is_same_v<T, Grid>) {
          std::array<int, 3> i0{};
          std::array<double, 3> w{};
          for (int a = 0; a < 3; ++a) {
            if (s.nodes[a] == 1) continue;
            const double u = std::clamp((x[a] - s.lo[a]) / (s.hi[a] - s.lo[a]), 0.0, 1.0) * (s.nodes[a] - 1);
            i0[a] = std::min(static_cast<int>(u), s.nodes[a] - 2);
            w[a] = u - i0[a];
          }
          double v = 0.0;
          for (int c = 0; c < 8; ++c) {
            double weight = 1.0;
            std::size_t idx = 0, stride = 1;
            bool skip = false;
            for (int a = 0; a < 3; ++a) {
              const int bit = (c >> a) & 1;
              if (s.nodes[a] == 1) {
                if (bit) skip = true;
              } else {
                weight *= bit ? w[a] : 1.0 - w[a];
                idx += stride * static_cast<std::size_t>(i0[a] + bit);
              }
              stride *= static_cast<std::size_t>(s.nodes[a]);
            }
            if (!skip && weight > 0.0) v += weight * s.values[idx];
          }
          return v;
        } else if constexpr (std::is_same_v<T, Product>) {
          double r2 = 0.0;
          for (int a = 0; a < s.q; ++a) r2 += (x[a] - s.center[a]) * (x[a] - s.center[a]);
          return eval_extended(s.profile, std::sqrt(r2));
        } else {
          return s.fn(x);
        }
      },
      kind_);
}

double Majorant::capped(const Point& x) const {
  const double v = (*this)(x);
  return cap_ ? std::min(v, *cap_) : v;
}

std::string Majorant::describe() const {
  std::string out = std::visit(
      [&](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Composed>) {
          return s.g.family_name() + "(dist(x, " + s.set.describe() + "))";
        } else if constexpr (std::is_same_v<T, Grid>) {
          return "grid[" + std::to_string(s.values.size()) + " nodes]";
        } else if constexpr (std::is_same_v<T, Product>) {
          return s.profile.family_name() + "(|x_<" + std::to_string(s.q) + " - c|)";
        } else {
          return s.label;
        }
      },
      kind_);
  if (cap_) out += " capped at " + format_double(*cap_);
  return out;
}

// ---------------------------------------------------------------- distribution

std::vector<double> sample_values(const Majorant& F, const Region& omega, long n, std::uint64_t seed, int shards) {
  if (F.dim() != omega.dim()) throw ArgumentError("majorant and region dimensions differ");
  if (shards < 1) shards = 1;
  std::vector<double> out(static_cast<std::size_t>(n));
  auto run = [&](int shard) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(shard)));
    for (long i = shard; i < n; i += shards) out[static_cast<std::size_t>(i)] = F(omega.sample(rng));
  };
  if (shards == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int s = 0; s < shards; ++s) pool.emplace_back(run, s);
    for (auto& t : pool) t.join();
  }
  return out;
}

std::vector<double> isotonic_nonincreasing(const std::vector<double>& y) {
  // Blocks of (mean, count); merge while a later block exceeds an earlier one.
  std::vector<std::pair<double, long>> blocks;
  for (double v : y) {
    blocks.emplace_back(v, 1);
    while (blocks.size() > 1 && blocks[blocks.size() - 2].first < blocks.back().first) {
      auto [m2, c2] = blocks.back();
      blocks.pop_back();
      auto& [m1, c1] = blocks.back();
      m1 = (m1 * c1 + m2 * c2) / static_cast<double>(c1 + c2);
      c1 += c2;
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (const auto& [m, c] : blocks) out.insert(out.end(), static_cast<std::size_t>(c), m);
  return out;
}

namespace {

void check_sampling(long n) {
  if (n < 10000) throw ArgumentError("distribution sampling needs n >= 1e4");
}

struct SortedSample {
  std::vector<double> v;  // sorted ascending, finite and infinite
  double m_omega;
  // m({F > s})
  double above(double s) const {
    const auto it = std::upper_bound(v.begin(), v.end(), s);
    return m_omega * static_cast<double>(v.end() - it) / static_cast<double>(v.size());
  }
  // m({F >= s})
  double at_least(double s) const {
    const auto it = std::lower_bound(v.begin(), v.end(), s);
    return m_omega * static_cast<double>(v.end() - it) / static_cast<double>(v.size());
  }
};

}  // namespace

DistFn distribution_function(const Majorant& F, const Region& omega, long n, std::vector<double> s_grid,
                             std::uint64_t seed, int shards) {
  check_sampling(n);
  for (std::size_t i = 1; i < s_grid.size(); ++i)
    if (!(s_grid[i] > s_grid[i - 1])) throw ArgumentError("s-grid must be strictly increasing");
  if (!s_grid.empty() && !(s_grid.front() > 0.0)) throw ArgumentError("s-grid must be positive");
  SortedSample smp{sample_values(F, omega, n, seed, shards), omega.volume()};
  std::sort(smp.v.begin(), smp.v.end());

  DistFn out;
  out.omega_measure = smp.m_omega;
  out.n = n;
  out.seed = seed;
  const auto first_inf = std::lower_bound(smp.v.begin(), smp.v.end(), kInfinity);
  out.infinite_fraction = static_cast<double>(smp.v.end() - first_inf) / static_cast<double>(n);
  const auto first_pos = std::upper_bound(smp.v.begin(), smp.v.end(), 0.0);
  const bool any_finite_positive = first_pos != first_inf;
  out.max_finite = any_finite_positive ? *(first_inf - 1) : 0.0;

  if (s_grid.empty()) {
    if (any_finite_positive) {
      const double lo = *first_pos;
      double hi = F.cap() ? std::min(*F.cap(), out.max_finite) : out.max_finite;
      if (!(hi > lo)) hi = lo;
      const int nodes = hi > lo ? 64 : 1;
      for (int i = 0; i < nodes; ++i)
        s_grid.push_back(nodes == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (nodes - 1)));
      s_grid.back() = hi;
      if (out.max_finite > hi) s_grid.push_back(out.max_finite);
    } else {
      s_grid.push_back(1.0);
    }
  }
  out.s_grid = s_grid;
  for (double s : s_grid) out.values.push_back(smp.above(s));
  out.values = isotonic_nonincreasing(out.values);

  // Atoms: values carried by at least max(10, n/1000) samples become exact jumps.
  const long atom_min = std::max<long>(10, n / 1000);
  std::vector<double> atoms;
  for (auto it = first_pos; it != first_inf;) {
    const auto end = std::upper_bound(it, first_inf, *it);
    if (end - it >= atom_min) atoms.push_back(*it);
    it = end;
  }

  std::vector<DecreasingFn::Knot> knots;
  const double left_value = smp.above(0.0);
  std::size_t ai = 0;
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    const double s = s_grid[i];
    while (ai < atoms.size() && atoms[ai] <= s) {
      if (atoms[ai] < s) {
        knots.push_back({atoms[ai], smp.at_least(atoms[ai])});
        knots.push_back({atoms[ai], smp.above(atoms[ai])});
      } else {
        knots.push_back({s, smp.at_least(s)});
      }
      ++ai;
    }
    if (i == 0 && (knots.empty() || knots.front().t > s)) knots.insert(knots.begin(), {s, left_value});
    knots.push_back({s, out.values[i]});
  }
  for (; ai < atoms.size(); ++ai) {
    knots.push_back({atoms[ai], smp.at_least(atoms[ai])});
    knots.push_back({atoms[ai], smp.above(atoms[ai])});
  }
  // Enforce the table invariants after mixing exact atom values with projected nodes.
  for (std::size_t i = 1; i < knots.size(); ++i) knots[i].value = std::min(knots[i].value, knots[i - 1].value);
  if (knots.back().t == knots.front().t) knots.push_back({2.0 * knots.back().t + 1.0, knots.back().value});
  out.f = DecreasingFn::tabulated(knots, Interval{0.0, kInfinity, false, false}, true);
  return out;
}

DistFn empirical_distribution(const Majorant& F, const Region& omega, long n, std::uint64_t seed) {
  check_sampling(n);
  SortedSample smp{sample_values(F, omega, n, seed), omega.volume()};
  std::sort(smp.v.begin(), smp.v.end());
  DistFn out;
  out.omega_measure = smp.m_omega;
  out.n = n;
  out.seed = seed;
  out.exact_steps = true;
  const auto first_inf = std::lower_bound(smp.v.begin(), smp.v.end(), kInfinity);
  out.infinite_fraction = static_cast<double>(smp.v.end() - first_inf) / static_cast<double>(n);
  const auto first_pos = std::upper_bound(smp.v.begin(), smp.v.end(), 0.0);
  out.max_finite = first_pos != first_inf ? *(first_inf - 1) : 0.0;
  std::vector<DecreasingFn::Knot> knots;
  const double w = smp.m_omega / static_cast<double>(n);
  double level = w * static_cast<double>(smp.v.end() - first_pos);
  if (first_pos == first_inf) {
    knots.push_back({1.0, level});
    knots.push_back({2.0, level});
  }
  for (auto it = first_pos; it != first_inf;) {
    const auto end = std::upper_bound(it, first_inf, *it);
    knots.push_back({*it, level});
    level = w * static_cast<double>(smp.v.end() - end);
    knots.push_back({*it, level});
    out.s_grid.push_back(*it);
    out.values.push_back(level);
    it = end;
  }
  if (knots.back().t == knots.front().t) knots.push_back({2.0 * knots.back().t + 1.0, knots.back().value});
  out.f = DecreasingFn::tabulated(knots, Interval{0.0, kInfinity, false, false}, true);
  return out;
}

DecreasingFn f1_transform(const DecreasingFn& f, double a) {
  if (!(a > 1.0)) throw ArgumentError("f1_transform requires a > 1");
  const double ln_a = std::log(a);
  DecreasingFn::Custom c;
  c.label = "f1[" + f.family_name() + ", a=" + format_double(a) + "]";
  c.value = [f, ln_a](double t) {
    const double s = std::exp(std::min(t * ln_a, 709.0));
    return eval_extended(f, s);
  };
  c.limit_hi = std::max(0.0, f.domain().hi_closed ? f(f.domain().hi) : f.limit_hi());
  return DecreasingFn::custom(std::move(c), Interval{0.0, kInfinity, false, false});
}

double integrate_tabulated(const DecreasingFn& f, double t) {
  const auto* tab = f.as<DecreasingFn::Tabulated>();
  if (!tab) throw ArgumentError("integrate_tabulated needs a tabulated function");
  const auto& k = tab->knots;
  double total = 0.0;
  if (t < k.front().t) total += (k.front().t - t) * k.front().value;
  for (std::size_t i = 0; i + 1 < k.size(); ++i) {
    const double a = std::max(t, k[i].t), b = k[i + 1].t;
    if (b <= a) continue;
    const double span = k[i + 1].t - k[i].t;
    auto at = [&](double x) { return k[i].value + (k[i + 1].value - k[i].value) * (x - k[i].t) / span; };
    total += 0.5 * (b - a) * (at(a) + at(b));
  }
  if (k.back().value > 0.0 && f.domain().hi == kInfinity) return kInfinity;
  return total;
}

LayerCake layer_cake_check(const Majorant& H, const Region& omega, double t, long n, std::uint64_t seed) {
  if (!(t > 0.0)) throw ArgumentError("layer_cake_check requires t > 0");
  const double m = omega.volume();
  // Left side: direct Monte Carlo mean of H 1{H > t}.
  const auto vals = sample_values(H, omega, n, derive_seed(seed, 1));
  double sum = 0.0, sum2 = 0.0;
  for (double v : vals) {
    const double x = v > t ? v : 0.0;
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  LayerCake out;
  out.lhs = m * mean;
  const double se_l = m * std::sqrt(var / n);
  // Right side: integrate the distribution function from an independent stream.
  const DistFn h = empirical_distribution(H, omega, n, derive_seed(seed, 2));
  out.rhs = integrate_tabulated(h.f, t) + t * h.f(t);
  // Its sampling error mirrors the left side's.
  out.std_error = std::sqrt(2.0) * se_l;
  out.residual = std::abs(out.lhs - out.rhs);
  if (std::isinf(out.lhs) && std::isinf(out.rhs)) out.residual = 0.0;
  return out;
}

void write_distfn_csv(const DistFn& d, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot write " + path);
  os << "s,f\n";
  for (std::size_t i = 0; i < d.s_grid.size(); ++i) os << format_double(d.s_grid[i]) << ',' << format_double(d.values[i]) << '\n';
}

}  // namespace growthbound
