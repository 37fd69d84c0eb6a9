#include "growthbound/geometry.hpp"

#include <algorithm>
#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

namespace growthbound {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;
using BPoint = bg::model::point<double, 3, bg::cs::cartesian>;
using BBox = bg::model::box<BPoint>;
using PointTree = bgi::rtree<std::pair<BPoint, std::size_t>, bgi::quadratic<16>>;
using BoxTree = bgi::rtree<std::pair<BBox, std::size_t>, bgi::quadratic<16>>;

namespace {

BPoint to_b(const Point& p) { return BPoint(p[0], p[1], p[2]); }

std::string fmt(double v) { return format_double(v); }

std::string fmt(const Point& p, int k) {
  std::string s = "(";
  for (int i = 0; i < k; ++i) s += (i ? "," : "") + fmt(p[i]);
  return s + ")";
}

double segment_dist(const Point& x, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(x - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(x, a + t * ab);
}

double box_dist(const Point& x, const Point& lo, const Point& hi) {
  double s = 0.0;
  for (int i = 0; i < kMaxDim; ++i) {
    const double d = std::max({lo[i] - x[i], 0.0, x[i] - hi[i]});
    s += d * d;
  }
  return std::sqrt(s);
}

void check_dim(int k) {
  if (k < 1 || k > kMaxDim) throw ArgumentError("dimension must be in 1..3, got " + std::to_string(k));
}

}  // namespace

// ---------------------------------------------------------------- matrices

Matrix3 identity3() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

Point apply(const Matrix3& m, const Point& x) {
  Point y{};
  for (int i = 0; i < 3; ++i) y[i] = m[i][0] * x[0] + m[i][1] * x[1] + m[i][2] * x[2];
  return y;
}

Point apply_transpose(const Matrix3& m, const Point& x) {
  Point y{};
  for (int i = 0; i < 3; ++i) y[i] = m[0][i] * x[0] + m[1][i] * x[1] + m[2][i] * x[2];
  return y;
}

double orthogonality_defect(const Matrix3& u, int k) {
  double worst = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      double s = 0.0;
      for (int l = 0; l < k; ++l) s += u[l][i] * u[l][j];
      worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

Matrix3 plane_rotation(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
}

// ---------------------------------------------------------------- Region

struct Region::Rep {
  Shape shape;
  int k = 2;
  double volume = 0.0;
  // Union only: boundary samples not covered by other members.
  std::vector<Point> boundary_samples;
  PointTree boundary_tree;
};

namespace {

std::vector<Point> member_boundary_samples(const Region& r) {
  std::vector<Point> out;
  const int k = r.dim();
  if (const auto* b = std::get_if<Region::Ball>(&r.shape())) {
    if (k == 2) {
      const int n = 1 << 17;
      for (int i = 0; i < n; ++i) {
        const double th = 2.0 * std::numbers::pi * (i + 0.5) / n;
        out.push_back({b->center[0] + b->radius * std::cos(th), b->center[1] + b->radius * std::sin(th), 0.0});
      }
    } else {
      const int n = 400000;
      const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
      for (int i = 0; i < n; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / n;
        const double rr = std::sqrt(1.0 - z * z);
        out.push_back(b->center + b->radius * Point{rr * std::cos(ga * i), rr * std::sin(ga * i), z});
      }
    }
  } else if (const auto* bx = std::get_if<Region::Box>(&r.shape())) {
    const int m = k == 2 ? 1 << 15 : 400;
    for (int axis = 0; axis < k; ++axis)
      for (int side = 0; side < 2; ++side) {
        const double fixed = side ? bx->hi[axis] : bx->lo[axis];
        const int o1 = (axis + 1) % k, o2 = (axis + 2) % k;
        if (k == 2) {
          for (int i = 0; i <= m; ++i) {
            Point p{};
            p[axis] = fixed;
            p[o1] = bx->lo[o1] + (bx->hi[o1] - bx->lo[o1]) * i / m;
            out.push_back(p);
          }
        } else {
          for (int i = 0; i <= m; ++i)
            for (int j = 0; j <= m; ++j) {
              Point p{};
              p[axis] = fixed;
              p[o1] = bx->lo[o1] + (bx->hi[o1] - bx->lo[o1]) * i / m;
              p[o2] = bx->lo[o2] + (bx->hi[o2] - bx->lo[o2]) * j / m;
              out.push_back(p);
            }
        }
      }
  } else {
    for (const auto& m : std::get<Region::Union>(r.shape()).members) {
      auto sub = member_boundary_samples(m);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  }
  return out;
}

// Nearest point of the member's boundary to x (x may lie inside or outside).
Point member_projection(const Region& r, const Point& x) {
  if (const auto* b = std::get_if<Region::Ball>(&r.shape())) {
    Point d = x - b->center;
    const double n = norm(d);
    if (n == 0.0) {
      d = Point{};
      d[0] = 1.0;
      return b->center + b->radius * d;
    }
    return b->center + (b->radius / n) * d;
  }
  if (const auto* bx = std::get_if<Region::Box>(&r.shape())) {
    const int k = r.dim();
    if (!r.contains(x)) {
      Point p = x;
      for (int i = 0; i < k; ++i) p[i] = std::clamp(x[i], bx->lo[i], bx->hi[i]);
      return p;
    }
    int best_axis = 0;
    bool best_hi = false;
    double best = kInfinity;
    for (int i = 0; i < k; ++i) {
      if (x[i] - bx->lo[i] < best) { best = x[i] - bx->lo[i]; best_axis = i; best_hi = false; }
      if (bx->hi[i] - x[i] < best) { best = bx->hi[i] - x[i]; best_axis = i; best_hi = true; }
    }
    Point p = x;
    p[best_axis] = best_hi ? bx->hi[best_axis] : bx->lo[best_axis];
    return p;
  }
  return x;
}

}  // namespace

int Region::dim() const { return rep_->k; }
const Region::Shape& Region::shape() const { return rep_->shape; }

Region Region::box(const Point& lo, const Point& hi, int k) {
  check_dim(k);
  Point l{}, h{};
  double vol = 1.0;
  for (int i = 0; i < k; ++i) {
    if (!(lo[i] < hi[i])) throw ArgumentError("AxisBox requires lo < hi componentwise");
    l[i] = lo[i];
    h[i] = hi[i];
    vol *= hi[i] - lo[i];
  }
  auto rep = std::make_shared<Rep>();
  rep->shape = Box{l, h};
  rep->k = k;
  rep->volume = vol;
  return Region(rep);
}

Region Region::ball(const Point& center, double radius, int k) {
  check_dim(k);
  if (!(radius > 0.0)) throw ArgumentError("Ball requires a positive radius");
  Point c{};
  for (int i = 0; i < k; ++i) c[i] = center[i];
  auto rep = std::make_shared<Rep>();
  rep->shape = Ball{c, radius};
  rep->k = k;
  rep->volume = unit_ball_volume(k) * std::pow(radius, k);
  return Region(rep);
}

Region Region::union_of(std::vector<Region> members) {
  if (members.empty()) throw ArgumentError("UnionOf requires at least one member");
  const int k = members.front().dim();
  for (const auto& m : members)
    if (m.dim() != k) throw ArgumentError("UnionOf members must share a dimension");
  auto rep = std::make_shared<Rep>();
  rep->k = k;
  rep->shape = Union{members};
  Region tmp(rep);
  // Boundary of the union: member boundary points not inside any other member.
  std::vector<std::pair<BPoint, std::size_t>> values;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (const auto& p : member_boundary_samples(members[i])) {
      bool covered = false;
      for (std::size_t j = 0; j < members.size() && !covered; ++j)
        if (j != i && members[j].contains(p)) covered = true;
      if (!covered) {
        values.emplace_back(to_b(p), rep->boundary_samples.size());
        rep->boundary_samples.push_back(p);
      }
    }
  }
  rep->boundary_tree = PointTree(values.begin(), values.end());
  // Volume by a fixed-seed Monte Carlo count.
  Point lo, hi;
  tmp.bounding_box(lo, hi);
  double box_vol = 1.0;
  for (int i = 0; i < k; ++i) box_vol *= hi[i] - lo[i];
  Rng rng(derive_seed(0x5eed, 17));
  const long n = 2'000'000;
  long hits = 0;
  for (long s = 0; s < n; ++s) {
    Point p{};
    for (int i = 0; i < k; ++i) p[i] = lo[i] + (hi[i] - lo[i]) * uniform01(rng);
    if (tmp.contains(p)) ++hits;
  }
  rep->volume = box_vol * static_cast<double>(hits) / n;
  return Region(rep);
}

bool Region::contains(const Point& x) const {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          for (int i = 0; i < dim(); ++i)
            if (!(x[i] > s.lo[i] && x[i] < s.hi[i])) return false;
          return true;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return distance(x, s.center) < s.radius;
        } else {
          for (const auto& m : s.members)
            if (m.contains(x)) return true;
          return false;
        }
      },
      shape());
}

double Region::boundary_dist(const Point& x) const {
  if (!contains(x)) throw OutsideRegion("point " + fmt(x, dim()) + " is not inside " + describe());
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          double d = kInfinity;
          for (int i = 0; i < dim(); ++i) d = std::min({d, x[i] - s.lo[i], s.hi[i] - x[i]});
          return d;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return s.radius - distance(x, s.center);
        } else {
          double best = kInfinity;
          for (std::size_t i = 0; i < s.members.size(); ++i) {
            const Point p = member_projection(s.members[i], x);
            bool covered = false;
            for (std::size_t j = 0; j < s.members.size() && !covered; ++j)
              if (j != i && s.members[j].contains(p)) covered = true;
            if (!covered) best = std::min(best, distance(x, p));
          }
          std::vector<std::pair<BPoint, std::size_t>> hit;
          rep_->boundary_tree.query(bgi::nearest(to_b(x), 1), std::back_inserter(hit));
          if (!hit.empty()) best = std::min(best, distance(x, rep_->boundary_samples[hit.front().second]));
          return best;
        }
      },
      shape());
}

void Region::bounding_box(Point& lo, Point& hi) const {
  lo = Point{};
  hi = Point{};
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          lo = s.lo;
          hi = s.hi;
        } else if constexpr (std::is_same_v<T, Ball>) {
          for (int i = 0; i < dim(); ++i) {
            lo[i] = s.center[i] - s.radius;
            hi[i] = s.center[i] + s.radius;
          }
        } else {
          for (int i = 0; i < dim(); ++i) {
            lo[i] = kInfinity;
            hi[i] = -kInfinity;
          }
          for (const auto& m : s.members) {
            Point l, h;
            m.bounding_box(l, h);
            for (int i = 0; i < dim(); ++i) {
              lo[i] = std::min(lo[i], l[i]);
              hi[i] = std::max(hi[i], h[i]);
            }
          }
        }
      },
      shape());
}

double Region::volume() const { return rep_->volume; }

double Region::inradius() const {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          double d = kInfinity;
          for (int i = 0; i < dim(); ++i) d = std::min(d, 0.5 * (s.hi[i] - s.lo[i]));
          return d;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return s.radius;
        } else {
          // Lower bound: the largest member inradius.
          double d = 0.0;
          for (const auto& m : s.members) d = std::max(d, m.inradius());
          return d;
        }
      },
      shape());
}

Point Region::sample(Rng& rng) const {
  Point lo, hi;
  bounding_box(lo, hi);
  for (;;) {
    Point p{};
    for (int i = 0; i < dim(); ++i) p[i] = lo[i] + (hi[i] - lo[i]) * uniform01(rng);
    if (contains(p)) return p;
  }
}

std::string Region::describe() const {
  return std::visit(
      [&](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          return "box[" + fmt(s.lo, dim()) + "," + fmt(s.hi, dim()) + "]";
        } else if constexpr (std::is_same_v<T, Ball>) {
          return "ball[" + fmt(s.center, dim()) + ",r=" + fmt(s.radius) + "]";
        } else {
          std::string out = "union[";
          for (std::size_t i = 0; i < s.members.size(); ++i) out += (i ? ";" : "") + s.members[i].describe();
          return out + "]";
        }
      },
      shape());
}

double boundary_dist(const Point& x, const Region& omega) { return omega.boundary_dist(x); }

// ---------------------------------------------------------------- SetDescr

struct SetDescr::Rep {
  Shape shape;
  int k = 2;
  Point lo{}, hi{};
  std::vector<Point> path;  // polyline vertices in world coordinates (Polyline, LipGraph)
  BoxTree segment_tree;
  PointTree point_tree;
};

namespace {

void build_path_index(SetDescr::Rep& rep) {
  if (rep.path.size() < 2) return;
  std::vector<std::pair<BBox, std::size_t>> values;
  for (std::size_t i = 0; i + 1 < rep.path.size(); ++i) {
    const Point& a = rep.path[i];
    const Point& b = rep.path[i + 1];
    BPoint lo(std::min(a[0], b[0]), std::min(a[1], b[1]), std::min(a[2], b[2]));
    BPoint hi(std::max(a[0], b[0]), std::max(a[1], b[1]), std::max(a[2], b[2]));
    values.emplace_back(BBox(lo, hi), i);
  }
  rep.segment_tree = BoxTree(values.begin(), values.end());
}

double path_dist(const SetDescr::Rep& rep, const Point& x) {
  const auto& p = rep.path;
  if (p.size() == 1) return distance(x, p[0]);
  if (p.size() < 48) {
    double best = kInfinity;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) best = std::min(best, segment_dist(x, p[i], p[i + 1]));
    return best;
  }
  double best = kInfinity;
  const BPoint q = to_b(x);
  for (auto it = rep.segment_tree.qbegin(bgi::nearest(q, static_cast<unsigned>(p.size())));
       it != rep.segment_tree.qend(); ++it) {
    const double box_d = bg::distance(q, it->first);
    if (box_d >= best) break;
    best = std::min(best, segment_dist(x, p[it->second], p[it->second + 1]));
  }
  return best;
}

void set_bbox(SetDescr::Rep& rep, const std::vector<Point>& pts) {
  for (int i = 0; i < kMaxDim; ++i) {
    rep.lo[i] = i < rep.k ? kInfinity : 0.0;
    rep.hi[i] = i < rep.k ? -kInfinity : 0.0;
  }
  for (const auto& p : pts)
    for (int i = 0; i < rep.k; ++i) {
      rep.lo[i] = std::min(rep.lo[i], p[i]);
      rep.hi[i] = std::max(rep.hi[i], p[i]);
    }
}

struct CantorWalker {
  const SetDescr::CantorDust& c;
  int split_axes;
  int k;

  double dist(const Point& x) const {
    Point lo = c.lo, hi = c.hi;
    for (int i = split_axes; i < k; ++i) hi[i] = lo[i];
    double best = kInfinity;
    recurse(x, lo, hi, 0, best);
    return best;
  }

  void recurse(const Point& x, const Point& lo, const Point& hi, int level, double& best) const {
    const double d = box_dist(x, lo, hi);
    if (d >= best) return;
    if (level == c.depth) {
      best = d;
      return;
    }
    // Visit children nearest-first for better pruning.
    std::array<std::pair<double, int>, 8> order{};
    const int n = c.corners;
    for (int m = 0; m < n; ++m) {
      Point cl, ch;
      child(lo, hi, m, cl, ch);
      order[m] = {box_dist(x, cl, ch), m};
    }
    std::sort(order.begin(), order.begin() + n);
    for (int j = 0; j < n; ++j) {
      if (order[j].first >= best) break;
      Point cl, ch;
      child(lo, hi, order[j].second, cl, ch);
      recurse(x, cl, ch, level + 1, best);
    }
  }

  void child(const Point& lo, const Point& hi, int m, Point& cl, Point& ch) const {
    cl = lo;
    ch = hi;
    for (int a = 0; a < split_axes; ++a) {
      const double w = hi[a] - lo[a];
      const double cw = c.ratio * w;
      cl[a] = ((m >> a) & 1) ? hi[a] - cw : lo[a];
      ch[a] = cl[a] + cw;
    }
  }

  void leaves(const Point& lo, const Point& hi, int level, std::vector<std::pair<Point, Point>>& out) const {
    if (level == c.depth) {
      out.emplace_back(lo, hi);
      return;
    }
    for (int m = 0; m < c.corners; ++m) {
      Point cl, ch;
      child(lo, hi, m, cl, ch);
      leaves(cl, ch, level + 1, out);
    }
  }
};

int split_axes_of(int corners) {
  switch (corners) {
    case 2: return 1;
    case 4: return 2;
    case 8: return 3;
  }
  throw ArgumentError("CantorDust corner count must be 2, 4 or 8");
}

std::vector<Point> sample_path(const std::vector<Point>& path, double spacing) {
  std::vector<Point> out;
  if (path.empty()) return out;
  out.push_back(path.front());
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double len = distance(path[i], path[i + 1]);
    const long m = std::max<long>(1, static_cast<long>(std::ceil(len / spacing)));
    for (long j = 1; j <= m; ++j) out.push_back(path[i] + (static_cast<double>(j) / m) * (path[i + 1] - path[i]));
  }
  return out;
}

double path_length(const std::vector<Point>& path) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) len += distance(path[i], path[i + 1]);
  return len;
}

}  // namespace

int SetDescr::dim() const { return rep_->k; }
const SetDescr::Shape& SetDescr::shape() const { return rep_->shape; }

SetDescr SetDescr::point_cloud(std::vector<Point> points, int k) {
  check_dim(k);
  if (points.empty()) throw ArgumentError("PointCloud requires at least one point");
  auto rep = std::make_shared<Rep>();
  rep->k = k;
  for (auto& p : points)
    for (int i = k; i < kMaxDim; ++i) p[i] = 0.0;
  set_bbox(*rep, points);
  std::vector<std::pair<BPoint, std::size_t>> values;
  for (std::size_t i = 0; i < points.size(); ++i) values.emplace_back(to_b(points[i]), i);
  rep->point_tree = PointTree(values.begin(), values.end());
  rep->shape = PointCloud{std::move(points)};
  return SetDescr(rep);
}

SetDescr SetDescr::polyline(std::vector<Point> vertices, int k) {
  check_dim(k);
  if (vertices.empty()) throw ArgumentError("Polyline requires at least one vertex");
  auto rep = std::make_shared<Rep>();
  rep->k = k;
  for (auto& p : vertices)
    for (int i = k; i < kMaxDim; ++i) p[i] = 0.0;
  set_bbox(*rep, vertices);
  rep->path = vertices;
  build_path_index(*rep);
  rep->shape = Polyline{std::move(vertices)};
  return SetDescr(rep);
}

SetDescr SetDescr::lip_graph(LipGraphData data, int k) {
  check_dim(k);
  if (k < 2) throw ArgumentError("LipGraph requires k >= 2");
  if (data.s.size() < 2 || data.s.size() != data.phi.size())
    throw ArgumentError("LipGraph requires matching s and phi samples (at least two)");
  for (std::size_t i = 1; i < data.s.size(); ++i)
    if (!(data.s[i] > data.s[i - 1])) throw ArgumentError("LipGraph chart samples must be strictly increasing");
  if (orthogonality_defect(data.rotation, k) > 1e-12) throw ArgumentError("LipGraph rotation is not orthogonal");
  if (!(data.L > 0.0)) throw ArgumentError("LipGraph requires L > 0");
  auto rep = std::make_shared<Rep>();
  rep->k = k;
  for (std::size_t i = 0; i < data.s.size(); ++i) {
    Point c{};
    c[0] = data.s[i];
    for (int j = 1; j < k; ++j) c[j] = data.phi[i][j - 1];
    Point w = data.anchor + apply_transpose(data.rotation, c);
    for (int j = k; j < kMaxDim; ++j) w[j] = 0.0;
    rep->path.push_back(w);
  }
  set_bbox(*rep, rep->path);
  build_path_index(*rep);
  rep->shape = std::move(data);
  return SetDescr(rep);
}

SetDescr SetDescr::cantor_dust(int corners, double ratio, int depth, const Point& lo, const Point& hi, int k) {
  check_dim(k);
  const int axes = split_axes_of(corners);
  if (axes > k) throw ArgumentError("CantorDust splits more axes than the dimension");
  if (!(ratio > 0.0 && ratio < 0.5)) throw ArgumentError("CantorDust ratio must lie in (0, 1/2)");
  if (depth < 0 || depth > 16) throw ArgumentError("CantorDust depth must be in 0..16");
  auto rep = std::make_shared<Rep>();
  rep->k = k;
  CantorDust c{corners, ratio, depth, Point{}, Point{}};
  for (int i = 0; i < k; ++i) {
    c.lo[i] = lo[i];
    c.hi[i] = i < axes ? hi[i] : lo[i];
    if (i < axes && !(hi[i] > lo[i])) throw ArgumentError("CantorDust bounding box is degenerate");
  }
  rep->lo = c.lo;
  rep->hi = c.hi;
  rep->shape = c;
  return SetDescr(rep);
}

SetDescr SetDescr::union_of(std::vector<SetDescr> members) {
  if (members.empty()) throw ArgumentError("UnionOf requires at least one member");
  auto rep = std::make_shared<Rep>();
  rep->k = members.front().dim();
  for (int i = 0; i < kMaxDim; ++i) {
    rep->lo[i] = i < rep->k ? kInfinity : 0.0;
    rep->hi[i] = i < rep->k ? -kInfinity : 0.0;
  }
  for (const auto& m : members) {
    if (m.dim() != rep->k) throw ArgumentError("UnionOf members must share a dimension");
    Point l, h;
    m.bounding_box(l, h);
    for (int i = 0; i < rep->k; ++i) {
      rep->lo[i] = std::min(rep->lo[i], l[i]);
      rep->hi[i] = std::max(rep->hi[i], h[i]);
    }
  }
  rep->shape = Union{std::move(members)};
  return SetDescr(rep);
}

double SetDescr::dist(const Point& x) const {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointCloud>) {
          if (s.points.size() <= 32) {
            double best = kInfinity;
            for (const auto& p : s.points) best = std::min(best, distance(x, p));
            return best;
          }
          std::vector<std::pair<BPoint, std::size_t>> hit;
          rep_->point_tree.query(bgi::nearest(to_b(x), 1), std::back_inserter(hit));
          return distance(x, s.points[hit.front().second]);
        } else if constexpr (std::is_same_v<T, Polyline> || std::is_same_v<T, LipGraphData>) {
          return path_dist(*rep_, x);
        } else if constexpr (std::is_same_v<T, CantorDust>) {
          return CantorWalker{s, split_axes_of(s.corners), dim()}.dist(x);
        } else {
          double best = kInfinity;
          for (const auto& m : s.members) best = std::min(best, m.dist(x));
          return best;
        }
      },
      shape());
}

void SetDescr::bounding_box(Point& lo, Point& hi) const {
  lo = rep_->lo;
  hi = rep_->hi;
}

std::vector<Point> SetDescr::sample(double spacing) const {
  return std::visit(
      [&](const auto& s) -> std::vector<Point> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointCloud>) {
          return s.points;
        } else if constexpr (std::is_same_v<T, Polyline> || std::is_same_v<T, LipGraphData>) {
          return sample_path(rep_->path, spacing > 0.0 ? spacing : default_resolution());
        } else if constexpr (std::is_same_v<T, CantorDust>) {
          CantorWalker w{s, split_axes_of(s.corners), dim()};
          std::vector<std::pair<Point, Point>> boxes;
          w.leaves(rep_->lo, rep_->hi, 0, boxes);
          std::vector<Point> out;
          const double leaf = default_resolution();
          const int m = spacing > 0.0 && spacing < leaf ? static_cast<int>(std::ceil(leaf / spacing)) : 1;
          const int axes = split_axes_of(s.corners);
          for (const auto& [lo, hi] : boxes) {
            if (m == 1) {
              out.push_back(0.5 * (lo + hi));
              continue;
            }
            const int total = static_cast<int>(std::pow(m, axes));
            for (int idx = 0; idx < total; ++idx) {
              Point p = lo;
              int rem = idx;
              for (int a = 0; a < axes; ++a) {
                p[a] = lo[a] + (hi[a] - lo[a]) * ((rem % m) + 0.5) / m;
                rem /= m;
              }
              out.push_back(p);
            }
          }
          return out;
        } else {
          std::vector<Point> out;
          for (const auto& m : s.members) {
            auto sub = m.sample(spacing);
            out.insert(out.end(), sub.begin(), sub.end());
          }
          return out;
        }
      },
      shape());
}

double SetDescr::default_resolution() const {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointCloud>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, Polyline> || std::is_same_v<T, LipGraphData>) {
          const double len = path_length(rep_->path);
          return len > 0.0 ? len / 4096.0 : 1.0;
        } else if constexpr (std::is_same_v<T, CantorDust>) {
          double w = kInfinity;
          for (int a = 0; a < split_axes_of(s.corners); ++a) w = std::min(w, s.hi[a] - s.lo[a]);
          return w * std::pow(s.ratio, s.depth);
        } else {
          double r = kInfinity;
          for (const auto& m : s.members) {
            const double mr = m.default_resolution();
            if (mr > 0.0) r = std::min(r, mr);
          }
          return std::isfinite(r) ? r : 0.0;
        }
      },
      shape());
}

std::string SetDescr::describe() const {
  return std::visit(
      [&](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PointCloud>) {
          return "points[" + std::to_string(s.points.size()) + "]";
        } else if constexpr (std::is_same_v<T, Polyline>) {
          return "polyline[" + std::to_string(s.vertices.size()) + " vertices]";
        } else if constexpr (std::is_same_v<T, LipGraphData>) {
          return "lipgraph[" + std::to_string(s.s.size()) + " samples, L=" + fmt(s.L) + "]";
        } else if constexpr (std::is_same_v<T, CantorDust>) {
          return "cantor[corners=" + std::to_string(s.corners) + ",ratio=" + fmt(s.ratio) +
                 ",depth=" + std::to_string(s.depth) + "]";
        } else {
          std::string out = "union[";
          for (std::size_t i = 0; i < s.members.size(); ++i) out += (i ? ";" : "") + s.members[i].describe();
          return out + "]";
        }
      },
      shape());
}

double dist_to_set(const Point& x, const SetDescr& s) { return s.dist(x); }

LipGraphData sawtooth_graph(double s_lo, double s_hi, double slope, double period, double spacing, double L,
                            const Point& anchor, const Matrix3& rotation) {
  if (!(s_hi > s_lo) || !(spacing > 0.0) || !(period > 0.0)) throw ArgumentError("sawtooth_graph: bad parameters");
  LipGraphData d;
  d.L = L;
  d.anchor = anchor;
  d.rotation = rotation;
  const long n = static_cast<long>(std::ceil((s_hi - s_lo) / spacing));
  std::vector<double> s;
  for (long i = 0; i <= n; ++i) s.push_back(s_lo + (s_hi - s_lo) * static_cast<double>(i) / n);
  // Include the corners of the triangle wave so the interpolant is exact.
  const double half = 0.5 * period;
  for (double c = std::ceil(s_lo / half) * half; c < s_hi; c += half) s.push_back(c);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end(), [](double a, double b) { return std::abs(a - b) < 1e-15; }), s.end());
  for (double x : s) {
    double u = std::fmod(x - s_lo, period);
    if (u < 0) u += period;
    const double tri = u < half ? u : period - u;  // slope +1 then -1
    Point p{};
    p[0] = slope * tri;
    d.s.push_back(x);
    d.phi.push_back(p);
  }
  return d;
}

LipGraphData linear_graph(double s_lo, double s_hi, double slope, double spacing, double L, const Point& anchor,
                          const Matrix3& rotation) {
  if (!(s_hi > s_lo) || !(spacing > 0.0)) throw ArgumentError("linear_graph: bad parameters");
  LipGraphData d;
  d.L = L;
  d.anchor = anchor;
  d.rotation = rotation;
  const long n = static_cast<long>(std::ceil((s_hi - s_lo) / spacing));
  for (long i = 0; i <= n; ++i) {
    const double x = s_lo + (s_hi - s_lo) * static_cast<double>(i) / n;
    Point p{};
    p[0] = slope * x;
    d.s.push_back(x);
    d.phi.push_back(p);
  }
  return d;
}

// ---------------------------------------------------------------- Monte Carlo measure

MCEstimate tube_measure(const SetDescr& g, double sigma, const Point& x, double radius, long n, std::uint64_t seed,
                        int shards) {
  if (!(sigma > 0.0) || !(radius > 0.0)) throw ArgumentError("tube_measure requires sigma > 0 and R > 0");
  if (n < 1000) throw ArgumentError("tube_measure requires n >= 1000");
  if (shards < 1) shards = 1;
  const int k = g.dim();
  Point glo, ghi;
  g.bounding_box(glo, ghi);
  Point qlo{}, qhi{};
  double qvol = 1.0;
  for (int i = 0; i < k; ++i) {
    qlo[i] = std::max(glo[i] - sigma, x[i] - radius);
    qhi[i] = std::min(ghi[i] + sigma, x[i] + radius);
    if (!(qhi[i] > qlo[i])) return MCEstimate{0.0, 0.0, n, seed};
    qvol *= qhi[i] - qlo[i];
  }
  std::vector<long> hits(shards, 0);
  auto run = [&](int shard) {
    const long count = n / shards + (shard < n % shards ? 1 : 0);
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(shard)));
    long h = 0;
    for (long s = 0; s < count; ++s) {
      Point y{};
      for (int i = 0; i < k; ++i) y[i] = qlo[i] + (qhi[i] - qlo[i]) * uniform01(rng);
      if (!(distance(y, x) < radius)) continue;
      const double d = g.dist(y);
      if (d > 0.0 && d <= sigma) ++h;
    }
    hits[shard] = h;
  };
  if (shards == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int s = 0; s < shards; ++s) pool.emplace_back(run, s);
    for (auto& t : pool) t.join();
  }
  const long total = std::accumulate(hits.begin(), hits.end(), 0L);
  const double p = static_cast<double>(total) / n;
  return MCEstimate{qvol * p, qvol * std::sqrt(p * (1.0 - p) / n), n, seed};
}

ProbeSchedule default_probe_schedule(const SetDescr& g) {
  ProbeSchedule s;
  for (int i = 0; i < 5; ++i) {
    s.sigmas.push_back(1e-3 * std::pow(10.0, 0.5 * i));
    s.radii.push_back(1e-2 * std::pow(10.0, 0.5 * i));
  }
  Point lo, hi;
  g.bounding_box(lo, hi);
  const int k = g.dim();
  const int total = static_cast<int>(std::pow(3, k));
  for (int idx = 0; idx < total; ++idx) {
    Point c{};
    int rem = idx;
    for (int i = 0; i < k; ++i) {
      c[i] = lo[i] + (hi[i] - lo[i]) * 0.5 * (rem % 3);
      rem /= 3;
    }
    if (std::find(s.centers.begin(), s.centers.end(), c) == s.centers.end()) s.centers.push_back(c);
  }
  return s;
}

AdmissibilityEstimate admissibility_constant(const SetDescr& g, double p_star, const ProbeSchedule& schedule,
                                             std::uint64_t seed) {
  const int k = g.dim();
  if (!(p_star > 0.0 && p_star < k)) throw ArgumentError("admissibility requires 0 < p_star < k");
  if (schedule.sigmas.empty() || schedule.radii.empty() || schedule.centers.empty())
    throw ArgumentError("admissibility probe schedule is empty");
  AdmissibilityEstimate est;
  est.p_star = p_star;
  est.q_star = k - p_star;
  est.samples_per_probe = schedule.samples_per_probe;
  est.schedule = schedule;
  std::uint64_t probe = 0;
  for (const auto& c : schedule.centers)
    for (double R : schedule.radii)
      for (double sigma : schedule.sigmas) {
        const auto m = tube_measure(g, sigma, c, R, schedule.samples_per_probe, derive_seed(seed, probe++));
        const double scale = std::pow(sigma, est.q_star) * std::pow(R, p_star);
        const double ratio = m.value / scale;
        if (ratio > est.C_hat) {
          est.C_hat = ratio;
          est.worst_sigma = sigma;
          est.worst_radius = R;
          est.worst_center = c;
          est.worst_ratio_std_error = m.std_error / scale;
        }
      }
  est.probes = static_cast<long>(probe);
  if (!(est.C_hat > 0.0)) throw ArgumentError("admissibility schedule never met the set");
  return est;
}

AdmissibilityEstimate admissibility_given(double C, double p_star, int k) {
  if (!(C > 0.0)) throw ArgumentError("admissibility constant must be positive");
  if (!(p_star > 0.0 && p_star < k)) throw ArgumentError("admissibility requires 0 < p_star < k");
  AdmissibilityEstimate est;
  est.p_star = p_star;
  est.q_star = k - p_star;
  est.C_hat = C;
  return est;
}

// ---------------------------------------------------------------- covering

namespace {

long fpt_count(const std::vector<Point>& pts, double r) {
  if (pts.empty()) return 0;
  std::vector<double> d(pts.size(), kInfinity);
  std::size_t next = 0;
  long count = 0;
  for (;;) {
    ++count;
    const Point c = pts[next];
    double far = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      d[i] = std::min(d[i], distance(pts[i], c));
      if (d[i] > far) {
        far = d[i];
        next = i;
      }
    }
    if (far <= r) return count;
  }
}

}  // namespace

long covering_number(const SetDescr& g, double r, double spacing) {
  if (!(r > 0.0)) throw ArgumentError("covering_number requires r > 0");
  const double sp = spacing > 0.0 ? spacing : g.default_resolution();
  return fpt_count(g.sample(sp), r);
}

long covering_number_local(const std::vector<Point>& sample, const Point& x, double radius, double r) {
  std::vector<Point> sub;
  for (const auto& p : sample)
    if (distance(p, x) < radius) sub.push_back(p);
  return fpt_count(sub, r);
}

double assouad_estimate(const SetDescr& g, const std::vector<std::pair<double, double>>& scale_pairs, int n_centers,
                        std::uint64_t seed, double spacing) {
  if (scale_pairs.size() < 3) throw InsufficientScales("assouad_estimate needs at least 3 scale pairs");
  double min_ratio = kInfinity, max_ratio = 0.0;
  for (const auto& [R, r] : scale_pairs) {
    if (!(r > 0.0 && R > r)) throw ArgumentError("scale pairs need 0 < r < R");
    min_ratio = std::min(min_ratio, R / r);
    max_ratio = std::max(max_ratio, R / r);
  }
  if (min_ratio < 10.0 || max_ratio < 100.0)
    throw ArgumentError("scale pairs must have R/r >= 10 and reach R/r >= 100");
  const double sp = spacing > 0.0 ? spacing : g.default_resolution();
  const auto sample = g.sample(sp);
  std::vector<std::size_t> idx(sample.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  const std::size_t m = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, n_centers)), idx.size());
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform01(rng) * (idx.size() - i));
    std::swap(idx[i], idx[std::min(j, idx.size() - 1)]);
  }
  double best = -kInfinity;
  for (std::size_t c = 0; c < m; ++c) {
    const Point& x = sample[idx[c]];
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(scale_pairs.size());
    for (const auto& [R, r] : scale_pairs) {
      const double X = std::log(R / r);
      const double Y = std::log(static_cast<double>(std::max<long>(1, covering_number_local(sample, x, R, r))));
      sx += X;
      sy += Y;
      sxx += X * X;
      sxy += X * Y;
    }
    const double den = n * sxx - sx * sx;
    if (den <= 0.0) throw InsufficientScales("scale pairs do not vary in R/r");
    best = std::max(best, (n * sxy - sx * sy) / den);
  }
  return best;
}

// ---------------------------------------------------------------- charts

void validate_chart_params(const ChartParams& p, double alpha) {
  if (!(p.L >= 2.0)) throw ChartError("chart requires L >= 2, got " + fmt(p.L));
  if (!(p.R > 0.0)) throw ChartError("chart requires R > 0");
  if (!(p.R < 2.0 * alpha)) throw ChartError("chart radius R = " + fmt(p.R) + " must be below 2*alpha = " + fmt(2 * alpha));
}

Point LocalChart::to_chart(const Point& x) const { return growthbound::apply(U, x - origin); }

Point LocalChart::to_world(const Point& c) const {
  Point w = origin + apply_transpose(U, c);
  for (int i = k; i < kMaxDim; ++i) w[i] = 0.0;
  return w;
}

Point LocalChart::phi_at(double x) const {
  if (s.empty()) return Point{};
  if (x <= s.front()) return phi.front();
  if (x >= s.back()) return phi.back();
  const auto it = std::upper_bound(s.begin(), s.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - s.begin());
  const double w = (x - s[j - 1]) / (s[j] - s[j - 1]);
  return (1.0 - w) * phi[j - 1] + w * phi[j];
}

namespace {

// Frame whose first axis is the unit vector e1.
Matrix3 frame_from_tangent(const Point& e1, int k) {
  Matrix3 u{};
  u[0] = {e1[0], e1[1], e1[2]};
  if (k == 2) {
    u[1] = {-e1[1], e1[0], 0.0};
    u[2] = {0.0, 0.0, 1.0};
    return u;
  }
  Point t{1.0, 0.0, 0.0};
  if (std::abs(e1[0]) > 0.9) t = {0.0, 1.0, 0.0};
  Point e2 = t - dot(t, e1) * e1;
  e2 = (1.0 / norm(e2)) * e2;
  const Point e3{e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2], e1[0] * e2[1] - e1[1] * e2[0]};
  u[1] = {e2[0], e2[1], e2[2]};
  u[2] = {e3[0], e3[1], e3[2]};
  return u;
}

double vertical_norm(const Point& v, int k) {
  double s = 0.0;
  for (int i = 0; i < k - 1; ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

// The member of a union nearest to x.
const SetDescr& nearest_member(const SetDescr& a, const Point& x) {
  if (const auto* u = std::get_if<SetDescr::Union>(&a.shape())) {
    const SetDescr* best = &u->members.front();
    double bd = kInfinity;
    for (const auto& m : u->members) {
      const double d = m.dist(x);
      if (d < bd) {
        bd = d;
        best = &m;
      }
    }
    return nearest_member(*best, x);
  }
  return a;
}

}  // namespace

LocalChart local_chart(const SetDescr& a, const Point& anchor, const ChartParams& params) {
  const SetDescr& member = nearest_member(a, anchor);
  const int k = a.dim();
  LocalChart chart;
  chart.k = k;
  std::vector<Point> pts;
  if (const auto* lg = std::get_if<LipGraphData>(&member.shape())) {
    chart.U = lg->rotation;
    chart.origin = lg->anchor;
    chart.s = lg->s;
    for (const auto& p : lg->phi) {
      Point v{};
      for (int i = 0; i < k - 1; ++i) v[i] = p[i];
      chart.phi.push_back(v);
    }
  } else if (const auto* pl = std::get_if<SetDescr::Polyline>(&member.shape())) {
    if (pl->vertices.size() < 2) throw ChartError("a single vertex has no chart");
    std::size_t seg = 0;
    double bd = kInfinity;
    for (std::size_t i = 0; i + 1 < pl->vertices.size(); ++i) {
      const double d = segment_dist(anchor, pl->vertices[i], pl->vertices[i + 1]);
      if (d < bd) {
        bd = d;
        seg = i;
      }
    }
    Point e1 = pl->vertices[seg + 1] - pl->vertices[seg];
    e1 = (1.0 / norm(e1)) * e1;
    chart.U = frame_from_tangent(e1, k);
    chart.origin = anchor;
    // Polyline samples inside the chart cylinder, sorted by chart abscissa.
    std::vector<std::pair<double, Point>> inside;
    const double lim_v = 3.0 * params.L * params.R;
    for (const auto& w : sample_path(pl->vertices, params.R / 256.0)) {
      const Point c = chart.to_chart(w);
      Point v{};
      for (int i = 0; i < k - 1; ++i) v[i] = c[i + 1];
      if (std::abs(c[0]) <= params.R * (1.0 + 1.0 / 256.0) && vertical_norm(v, k) < lim_v) inside.emplace_back(c[0], v);
    }
    std::sort(inside.begin(), inside.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [s, v] : inside) {
      chart.s.push_back(s);
      chart.phi.push_back(v);
    }
  } else {
    throw ChartError("charts exist only for LipGraph and Polyline sets");
  }
  // Discrete Lipschitz constant over the part within the chart radius.
  const double sa = chart.to_chart(anchor)[0];
  for (std::size_t i = 0; i + 1 < chart.s.size(); ++i) {
    if (chart.s[i + 1] < sa - params.R || chart.s[i] > sa + params.R) continue;
    const double ds = chart.s[i + 1] - chart.s[i];
    const double dv = vertical_norm(chart.phi[i + 1] - chart.phi[i], k);
    const double slope = ds > 0.0 ? dv / ds : (dv > 0.0 ? kInfinity : 0.0);
    chart.max_slope = std::max(chart.max_slope, slope);
  }
  return chart;
}

std::vector<Point> chart_domain_boundary(const LocalChart& chart, double s_center, double r, double L, long n) {
  const int k = chart.k;
  const double H = 2.5 * L * r;
  Point c0{};
  c0[0] = s_center;
  const Point ph = chart.phi_at(s_center);
  for (int i = 1; i < k; ++i) c0[i] = ph[i - 1];
  std::vector<Point> out;
  auto emit = [&](double ds, double v1, double v2) {
    Point c = c0;
    c[0] += ds;
    c[1] += v1;
    if (k == 3) c[2] += v2;
    out.push_back(chart.to_world(c));
  };
  if (k == 2) {
    const double per = 4.0 * r + 4.0 * H;
    for (long i = 0; i < n; ++i) {
      double t = per * (i + 0.5) / n;
      if (t < 2.0 * H) { emit(-r, -H + t, 0); continue; }
      t -= 2.0 * H;
      if (t < 2.0 * r) { emit(-r + t, H, 0); continue; }
      t -= 2.0 * r;
      if (t < 2.0 * H) { emit(r, H - t, 0); continue; }
      t -= 2.0 * H;
      emit(r - t, -H, 0);
    }
    return out;
  }
  const double cap_area = std::numbers::pi * H * H;
  const double side_area = 2.0 * std::numbers::pi * H * 2.0 * r;
  const long n_cap = std::max<long>(1, static_cast<long>(n * cap_area / (2.0 * cap_area + side_area)));
  const long n_side = std::max<long>(1, n - 2 * n_cap);
  const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int side = 0; side < 2; ++side)
    for (long i = 0; i < n_cap; ++i) {
      const double rr = H * std::sqrt((i + 0.5) / n_cap);
      emit(side ? r : -r, rr * std::cos(ga * i), rr * std::sin(ga * i));
    }
  const long m_theta = std::max<long>(4, static_cast<long>(std::sqrt(n_side * 2.0 * std::numbers::pi * H / (2.0 * r))));
  const long m_s = std::max<long>(1, n_side / m_theta);
  for (long i = 0; i < m_s; ++i)
    for (long j = 0; j < m_theta; ++j) {
      const double ds = -r + 2.0 * r * (i + 0.5) / m_s;
      const double th = 2.0 * std::numbers::pi * (j + 0.5) / m_theta;
      emit(ds, H * std::cos(th), H * std::sin(th));
    }
  return out;
}

ChartReport chart_report(const SetDescr& a, const ChartParams& params, const std::vector<Point>& anchors) {
  ChartReport rep;
  const int k = a.dim();
  const double L = params.L;
  for (const auto& anchor : anchors) {
    ++rep.anchors;
    const LocalChart chart = local_chart(a, anchor, params);
    rep.max_slope = std::max(rep.max_slope, chart.max_slope);
    if (chart.max_slope > L * (1.0 + 1e-12)) {
      rep.pass = false;
      if (rep.message.empty())
        rep.message = "anchor " + fmt(anchor, k) + ": discrete Lipschitz constant " + fmt(chart.max_slope) +
                      " exceeds L = " + fmt(L);
    }
    // Other components must stay out of the chart cylinder C(a, R, 3LR).
    if (const auto* u = std::get_if<SetDescr::Union>(&a.shape())) {
      const SetDescr& own = nearest_member(a, anchor);
      for (const auto& m : u->members) {
        if (&nearest_member(m, anchor) == &own) continue;
        for (const auto& w : m.sample(params.R / 256.0)) {
          const Point c = chart.to_chart(w) - chart.to_chart(anchor);
          Point v{};
          for (int i = 0; i < k - 1; ++i) v[i] = c[i + 1];
          if (std::abs(c[0]) < params.R && vertical_norm(v, k) < 3.0 * L * params.R) {
            rep.pass = false;
            if (rep.message.empty())
              rep.message = "anchor " + fmt(anchor, k) + ": another component enters the chart cylinder at " + fmt(w, k);
            break;
          }
        }
      }
    }
    // Chart-distance sandwich on the boundary of D_{a,r}.
    const double r = params.R / (16.0 * L);
    const double sa = chart.to_chart(anchor)[0];
    for (const auto& x : chart_domain_boundary(chart, sa, r, L, 256)) {
      const Point c = chart.to_chart(x);
      Point v{};
      const Point ph = chart.phi_at(c[0]);
      for (int i = 0; i < k - 1; ++i) v[i] = c[i + 1] - ph[i];
      const double vert = vertical_norm(v, k);
      const double d = a.dist(x);
      const double tol = 1e-9 * r;
      ++rep.sandwich_samples;
      rep.worst_lower_slack = std::min(rep.worst_lower_slack, d - vert / (L + 1.0));
      rep.worst_upper_slack = std::min(rep.worst_upper_slack, vert - d);
      if (d < vert / (L + 1.0) - tol || d > vert + tol) {
        rep.pass = false;
        if (rep.message.empty())
          rep.message = "anchor " + fmt(anchor, k) + ": chart sandwich fails at " + fmt(x, k) + " (dist " + fmt(d) +
                        ", vertical " + fmt(vert) + ")";
      }
    }
  }
  return rep;
}

ChartReport lipschitz_chart_check(const SetDescr& a, const ChartParams& params, const std::vector<Point>& anchors) {
  ChartReport rep = chart_report(a, params, anchors);
  if (!rep.pass) throw ChartViolation(rep.message);
  return rep;
}

}  // namespace growthbound
