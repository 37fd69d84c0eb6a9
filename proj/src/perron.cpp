#include "growthbound/perron.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace growthbound {

// ---------------------------------------------------------------- grid

Grid Grid::over(const Region& omega, int nodes) {
  if (nodes < 3) throw ArgumentError("grid needs at least 3 nodes per axis");
  Grid g(omega);
  g.k_ = omega.dim();
  if (g.k_ < 2 || g.k_ > 3) throw ArgumentError("perron grids support k in {2, 3}");
  Point lo, hi;
  omega.bounding_box(lo, hi);
  double longest = 0.0;
  for (int a = 0; a < g.k_; ++a) longest = std::max(longest, hi[a] - lo[a]);
  g.h_ = longest / (nodes - 1);
  for (int a = 0; a < g.k_; ++a) {
    g.n_[a] = std::max(3, static_cast<int>(std::lround((hi[a] - lo[a]) / g.h_)) + 1);
    g.origin_[a] = 0.5 * (lo[a] + hi[a]) - 0.5 * g.h_ * (g.n_[a] - 1);
  }
  const std::size_t total = static_cast<std::size_t>(g.n_[0]) * g.n_[1] * g.n_[2];
  g.kind_.assign(total, Node::Ghost);
  for (std::size_t i = 0; i < total; ++i)
    if (g.has_stencil(i) && omega.contains(g.node(i))) g.kind_[i] = Node::Interior;
  return g;
}

std::array<int, 3> Grid::coords(std::size_t idx) const {
  const int i = static_cast<int>(idx % n_[0]);
  const std::size_t rest = idx / n_[0];
  return {i, static_cast<int>(rest % n_[1]), static_cast<int>(rest / n_[1])};
}

Point Grid::node(std::size_t idx) const {
  const auto c = coords(idx);
  Point p{};
  for (int a = 0; a < k_; ++a) p[a] = origin_[a] + h_ * c[a];
  return p;
}

bool Grid::has_stencil(std::size_t idx) const {
  const auto c = coords(idx);
  for (int a = 0; a < k_; ++a)
    if (c[a] == 0 || c[a] == n_[a] - 1) return false;
  return true;
}

void Grid::free_near(const SetDescr& set, double radius) {
  for (std::size_t i = 0; i < kind_.size(); ++i)
    if (kind_[i] == Node::Interior && set.dist(node(i)) <= radius) kind_[i] = Node::Free;
}

std::size_t Grid::count(Node kind) const { return std::count(kind_.begin(), kind_.end(), kind); }

double Grid::diameter() const {
  double s = 0.0;
  for (int a = 0; a < k_; ++a) s += std::pow(h_ * (n_[a] - 1), 2);
  return std::sqrt(s);
}

double optimal_relaxation(const Grid& grid) {
  const int n = *std::max_element(grid.shape().begin(), grid.shape().begin() + grid.dim());
  return 2.0 / (1.0 + std::sin(std::numbers::pi / n));
}

// ---------------------------------------------------------------- solver

std::vector<double> obstacle_values(const Majorant& F, const Grid& grid) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = F.capped(grid.node(i));
    if (!std::isfinite(v[i])) throw ArgumentError("obstacle is infinite at a grid node; set a cap");
  }
  return v;
}

PerronResult largest_subharmonic_minorant(const Majorant& F, const Grid& grid, const PerronOptions& opts) {
  PerronResult r = largest_subharmonic_minorant(obstacle_values(F, grid), grid, opts);
  if (F.cap()) r.cap = *F.cap();
  return r;
}

namespace {

struct Stencil {
  std::array<std::ptrdiff_t, 6> off{};
  int n = 4;
  double inv_n = 0.25;
};

Stencil make_stencil(const Grid& g) {
  Stencil s;
  s.n = 2 * g.dim();
  s.inv_n = 1.0 / s.n;
  for (int a = 0; a < g.dim(); ++a) {
    s.off[2 * a] = static_cast<std::ptrdiff_t>(g.stride(a));
    s.off[2 * a + 1] = -static_cast<std::ptrdiff_t>(g.stride(a));
  }
  return s;
}

inline double neighbour_mean(const double* u, std::size_t i, const Stencil& s) {
  double sum = 0.0;
  for (int q = 0; q < s.n; ++q) sum += u[static_cast<std::ptrdiff_t>(i) + s.off[q]];
  return sum * s.inv_n;
}

double sweep_red_black(std::vector<double>& u, const std::vector<double>& F,
                       const std::array<std::vector<std::size_t>, 2>& colors, const Stencil& s, double omega) {
  double change = 0.0;
  double* up = u.data();
  for (const auto& list : colors) {
    for (std::size_t i : list) {
      const double old = up[i];
      const double next = std::min(F[i], old + omega * (neighbour_mean(up, i, s) - old));
      change = std::max(change, std::abs(next - old));
      up[i] = next;
    }
  }
  return change;
}

double sweep_jacobi(std::vector<double>& u, std::vector<double>& scratch, const std::vector<double>& F,
                    const std::vector<std::size_t>& cells, const Stencil& s) {
  scratch = u;
  double change = 0.0;
  for (std::size_t i : cells) {
    const double next = std::min(F[i], neighbour_mean(u.data(), i, s));
    change = std::max(change, std::abs(next - u[i]));
    scratch[i] = next;
  }
  u.swap(scratch);
  return change;
}

}  // namespace

PerronResult largest_subharmonic_minorant(std::vector<double> F, const Grid& grid, const PerronOptions& opts) {
  if (F.size() != grid.size()) throw ArgumentError("obstacle size does not match the grid");
  PerronResult r;
  double cap = 0.0;
  for (double v : F) {
    if (!std::isfinite(v)) throw ArgumentError("obstacle must be finite on the grid");
    cap = std::max(cap, std::abs(v));
  }
  r.cap = cap;
  r.tol = opts.tol > 0.0 ? opts.tol : 1e-8 * std::max(cap, 1e-300);
  if (!(opts.relaxation > 0.0 && opts.relaxation < 2.0)) throw ArgumentError("relaxation must lie in (0, 2)");

  const Stencil st = make_stencil(grid);
  std::array<std::vector<std::size_t>, 2> colors;
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.kind(i) != Grid::Node::Interior) continue;
    const auto c = grid.coords(i);
    colors[(c[0] + c[1] + c[2]) & 1].push_back(i);
    cells.push_back(i);
  }

  std::vector<double> u = F, scratch, snapshot;
  double snapshot_residual = kInfinity;
  const bool audit = opts.audit_monotone && opts.relaxation == 1.0;
  double omega = opts.schedule == Schedule::RedBlack ? opts.relaxation : 1.0;
  long it = 0;
  double res = kInfinity;
  while (it < opts.max_iters) {
    res = opts.schedule == Schedule::RedBlack ? sweep_red_black(u, F, colors, st, omega)
                                              : sweep_jacobi(u, scratch, F, cells, st);
    ++it;
    if (audit && it % 10 == 0) {
      if (!snapshot.empty()) {
        for (std::size_t i : cells)
          if (u[i] > snapshot[i]) r.monotone = false;
        if (res > snapshot_residual * (1 + 1e-12) + 1e-300) r.monotone = false;
      }
      snapshot = u;
      snapshot_residual = res;
    }
    if (res <= r.tol) {
      if (omega == 1.0) break;
      omega = 1.0;  // polish with plain sweeps
    }
  }
  r.iterations = it;
  r.residual = res;
  r.converged = res <= r.tol && omega == 1.0;
  long active = 0;
  for (std::size_t i : cells)
    if (u[i] >= F[i] - r.tol) ++active;
  r.active_fraction = cells.empty() ? 0.0 : static_cast<double>(active) / cells.size();
  r.M = std::move(u);
  r.F = std::move(F);
  return r;
}

// ---------------------------------------------------------------- checks

SubharmonicReport discrete_subharmonic_check(const std::vector<double>& u, const Grid& grid, double tol,
                                             const std::function<bool(const Point&)>& exclude) {
  if (u.size() != grid.size()) throw ArgumentError("field size does not match the grid");
  const Stencil st = make_stencil(grid);
  SubharmonicReport rep;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.kind(i) == Grid::Node::Ghost || !grid.has_stencil(i)) continue;
    if (exclude && exclude(grid.node(i))) continue;
    ++rep.checked;
    const double excess = u[i] - neighbour_mean(u.data(), i, st);
    if (excess > tol) {
      rep.violations.push_back(i);
      rep.max_excess = std::max(rep.max_excess, excess);
    }
  }
  return rep;
}

MarginReport perron_vs_bound(const PerronResult& res, const Grid& grid, const std::function<double(const Point&)>& bound,
                             const std::function<bool(const Point&)>& where, double c_disc) {
  MarginReport rep;
  rep.c_disc = c_disc;
  const double scale = c_disc * std::sqrt(grid.spacing() / grid.diameter());
  rep.allowance_formula = "allowance(x) = " + format_double(c_disc) + " * sqrt(h/diam) * F(x), sqrt(h/diam) = " +
                          format_double(std::sqrt(grid.spacing() / grid.diameter()));
  rep.margins.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
  double worst_excess = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.kind(i) == Grid::Node::Ghost) continue;
    const Point x = grid.node(i);
    if (where && !where(x)) continue;
    const double b = bound(x);
    const double m = std::isinf(b) && b > 0 ? kInfinity : b - res.M[i];
    rep.margins[i] = m;
    ++rep.compared;
    if (m < rep.min_margin) {
      rep.min_margin = m;
      rep.witness = x;
    }
    const double excess = -m - scale * std::abs(res.F[i]);
    if (excess > 0.0) {
      ++rep.violations;
      if (excess > worst_excess) {
        worst_excess = excess;
        rep.worst_violation = x;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------- io

void write_field_csv(const PerronResult& res, const Grid& grid, const std::string& path, const std::string& stamp) {
  std::ofstream os(path);
  if (!os) throw ArgumentError("cannot write " + path);
  if (!stamp.empty()) os << stamp << '\n';
  const int k = grid.dim();
  os << (k == 3 ? "i,j,l,x,y,z,M,F,active\n" : "i,j,x,y,M,F,active\n");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto c = grid.coords(i);
    const Point x = grid.node(i);
    for (int a = 0; a < k; ++a) os << c[a] << ',';
    for (int a = 0; a < k; ++a) os << format_double(x[a]) << ',';
    const bool active = grid.kind(i) == Grid::Node::Interior && res.M[i] >= res.F[i] - res.tol;
    os << format_double(res.M[i]) << ',' << format_double(res.F[i]) << ',' << (active ? 1 : 0) << '\n';
  }
}

std::vector<double> read_obstacle_csv(const Grid& grid, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open field file " + path);
  const int k = grid.dim();
  std::vector<double> F(grid.size(), std::numeric_limits<double>::quiet_NaN());
  std::string line;
  while (std::getline(in, line) && (line.empty() || line[0] == '#')) {
  }  // stamp lines, then the header
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (static_cast<int>(cols.size()) != 2 * k + 3) throw ConfigError("field row has wrong column count: " + line);
    std::array<int, 3> c{0, 0, 0};
    for (int a = 0; a < k; ++a) c[a] = std::stoi(cols[a]);
    for (int a = 0; a < k; ++a)
      if (c[a] < 0 || c[a] >= grid.shape()[a]) throw ConfigError("field index outside the grid: " + line);
    std::istringstream fs(cols[2 * k + 1]);
    fs.imbue(std::locale::classic());
    double f;
    if (!(fs >> f)) throw ConfigError("bad F value: " + line);
    F[grid.index(c[0], c[1], c[2])] = f;
    ++rows;
  }
  if (rows != grid.size()) throw ConfigError("field file covers " + std::to_string(rows) + " of " +
                                             std::to_string(grid.size()) + " nodes");
  return F;
}

}  // namespace growthbound
