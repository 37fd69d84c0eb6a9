#include "growthbound/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <nlohmann/json.hpp>
#include <numbers>
#include <set>
#include <sstream>

namespace growthbound {

namespace {

using json = nlohmann::json;

// Typed access to one JSON object; defaults are written back so the document
// ends up fully resolved.
class Node {
 public:
  Node(json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) fail("expected an object");
  }

  const std::string& pointer() const { return ptr_; }
  std::string at(const std::string& key) const { return ptr_ + "/" + key; }
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigFieldError(ptr_.empty() ? "/" : ptr_, msg); }
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const { throw ConfigFieldError(at(key), msg); }

  bool has(const std::string& key) const { return j_.contains(key) && !j_[key].is_null(); }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items())
      if (!ok.count(k)) fail(k, "unknown field");
  }

  double number(const std::string& key) const {
    if (!j_.contains(key)) fail(key, "required field missing");
    return as_number(j_[key], at(key));
  }
  double number(const std::string& key, double def) {
    if (!j_.contains(key)) j_[key] = to_json(def);
    return as_number(j_[key], at(key));
  }
  double positive(const std::string& key) const {
    const double v = number(key);
    if (!(v > 0.0)) fail(key, "must be positive");
    return v;
  }
  double positive(const std::string& key, double def) {
    const double v = number(key, def);
    if (!(v > 0.0)) fail(key, "must be positive");
    return v;
  }
  long integer(const std::string& key, long def, long lo, long hi) {
    if (!j_.contains(key)) j_[key] = def;
    const json& v = j_[key];
    if (!v.is_number_integer() && !v.is_number_unsigned()) fail(key, "expected an integer");
    const long x = v.get<long>();
    if (x < lo || x > hi) fail(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }
  long integer(const std::string& key, long lo, long hi) const {
    if (!j_.contains(key)) fail(key, "required field missing");
    const json& v = j_[key];
    if (!v.is_number_integer() && !v.is_number_unsigned()) fail(key, "expected an integer");
    const long x = v.get<long>();
    if (x < lo || x > hi) fail(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }
  bool boolean(const std::string& key, bool def) {
    if (!j_.contains(key)) j_[key] = def;
    if (!j_[key].is_boolean()) fail(key, "expected true or false");
    return j_[key].get<bool>();
  }
  std::string string(const std::string& key) const {
    if (!j_.contains(key)) fail(key, "required field missing");
    if (!j_[key].is_string()) fail(key, "expected a string");
    return j_[key].get<std::string>();
  }
  std::string string(const std::string& key, const std::string& def) {
    if (!j_.contains(key)) j_[key] = def;
    return string(key);
  }
  Point point(const std::string& key, int k) const {
    if (!j_.contains(key)) fail(key, "required field missing");
    return as_point(j_[key], at(key), k);
  }
  Point point(const std::string& key, int k, const Point& def) {
    if (!j_.contains(key)) {
      json a = json::array();
      for (int i = 0; i < k; ++i) a.push_back(def[i]);
      j_[key] = a;
    }
    return point(key, k);
  }
  std::vector<Point> points(const std::string& key, int k, bool allow_empty = false) const {
    if (!j_.contains(key)) fail(key, "required field missing");
    const json& a = j_[key];
    if (!a.is_array()) fail(key, "expected an array of points");
    if (a.empty() && !allow_empty) fail(key, "needs at least one point");
    std::vector<Point> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_point(a[i], at(key) + "/" + std::to_string(i), k));
    return out;
  }
  std::vector<Point> points(const std::string& key, int k, std::vector<Point> def) {
    if (!j_.contains(key)) {
      json a = json::array();
      for (const auto& p : def) {
        json q = json::array();
        for (int i = 0; i < k; ++i) q.push_back(p[i]);
        a.push_back(q);
      }
      j_[key] = a;
    }
    return points(key, k, true);
  }
  std::vector<double> numbers(const std::string& key) const {
    if (!j_.contains(key)) fail(key, "required field missing");
    const json& a = j_[key];
    if (!a.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_number(a[i], at(key) + "/" + std::to_string(i)));
    return out;
  }
  Node child(const std::string& key) const {
    if (!j_.contains(key)) fail(key, "required field missing");
    return Node(j_[key], at(key));
  }
  std::optional<Node> optional_child(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return Node(j_[key], at(key));
  }
  json& raw(const std::string& key) { return j_[key]; }

  static double as_number(const json& v, const std::string& ptr) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf") return kInfinity;
      if (s == "e") return std::numbers::e;
    }
    throw ConfigFieldError(ptr, "expected a number");
  }
  static Point as_point(const json& v, const std::string& ptr, int k) {
    if (!v.is_array() || static_cast<int>(v.size()) != k)
      throw ConfigFieldError(ptr, "expected " + std::to_string(k) + " coordinates");
    Point p{};
    for (int i = 0; i < k; ++i) {
      p[i] = as_number(v[i], ptr + "/" + std::to_string(i));
      if (!std::isfinite(p[i])) throw ConfigFieldError(ptr, "coordinates must be finite");
    }
    return p;
  }
  static json to_json(double v) {
    if (std::isinf(v) && v > 0) return "inf";
    if (std::isnan(v)) return nullptr;
    return v;
  }

 private:
  json& j_;
  std::string ptr_;
};

Region parse_region(Node n, int k) {
  const std::string type = n.string("type");
  if (type == "box") {
    n.allow({"type", "lo", "hi"});
    const Point lo = n.point("lo", k), hi = n.point("hi", k);
    for (int i = 0; i < k; ++i)
      if (!(hi[i] > lo[i])) n.fail("hi", "must exceed lo in every coordinate");
    return Region::box(lo, hi, k);
  }
  if (type == "ball") {
    n.allow({"type", "center", "radius"});
    return Region::ball(n.point("center", k), n.positive("radius"), k);
  }
  if (type == "union") {
    n.allow({"type", "members"});
    json& arr = n.raw("members");
    if (!arr.is_array() || arr.empty()) n.fail("members", "expected a non-empty array");
    std::vector<Region> members;
    for (std::size_t i = 0; i < arr.size(); ++i) members.push_back(parse_region(Node(arr[i], n.at("members") + "/" + std::to_string(i)), k));
    return Region::union_of(std::move(members));
  }
  n.fail("type", "unknown region type '" + type + "' (box, ball, union)");
}

Matrix3 rotation_of(Node& n) { return plane_rotation(n.number("angle", 0.0)); }

SetDescr parse_set(Node n, int k) {
  const std::string type = n.string("type");
  if (type == "points") {
    n.allow({"type", "points"});
    return SetDescr::point_cloud(n.points("points", k), k);
  }
  if (type == "polyline") {
    n.allow({"type", "vertices"});
    return SetDescr::polyline(n.points("vertices", k), k);
  }
  if (type == "sawtooth" || type == "linear_graph") {
    const double s_lo = n.number("s_lo"), s_hi = n.number("s_hi");
    if (!(s_hi > s_lo)) n.fail("s_hi", "must exceed s_lo");
    const double slope = n.number("slope");
    const double spacing = n.positive("spacing", 1e-3);
    const double L = n.positive("L");
    const Point anchor = n.point("anchor", k, Point{});
    const Matrix3 rot = rotation_of(n);
    if (type == "sawtooth") {
      n.allow({"type", "s_lo", "s_hi", "slope", "period", "spacing", "L", "anchor", "angle"});
      return SetDescr::lip_graph(sawtooth_graph(s_lo, s_hi, slope, n.positive("period"), spacing, L, anchor, rot), k);
    }
    n.allow({"type", "s_lo", "s_hi", "slope", "spacing", "L", "anchor", "angle"});
    return SetDescr::lip_graph(linear_graph(s_lo, s_hi, slope, spacing, L, anchor, rot), k);
  }
  if (type == "cantor_dust") {
    n.allow({"type", "corners", "ratio", "depth", "lo", "hi"});
    const long corners = n.integer("corners", 2, 8);
    const double ratio = n.positive("ratio");
    if (!(ratio < 0.5)) n.fail("ratio", "must be below 1/2");
    return SetDescr::cantor_dust(static_cast<int>(corners), ratio, static_cast<int>(n.integer("depth", 8, 1, 14)),
                                 n.point("lo", k), n.point("hi", k), k);
  }
  if (type == "union") {
    n.allow({"type", "members"});
    json& arr = n.raw("members");
    if (!arr.is_array() || arr.empty()) n.fail("members", "expected a non-empty array");
    std::vector<SetDescr> members;
    for (std::size_t i = 0; i < arr.size(); ++i) members.push_back(parse_set(Node(arr[i], n.at("members") + "/" + std::to_string(i)), k));
    return SetDescr::union_of(std::move(members));
  }
  n.fail("type", "unknown set type '" + type + "' (points, polyline, sawtooth, linear_graph, cantor_dust, union)");
}

ConcaveFn parse_psi(Node n) {
  const std::string kind = n.string("kind");
  if (kind == "power" || kind == "log_power") {
    n.allow({"kind", "theta", "scale", "shift", "offset"});
    const double theta = n.positive("theta");
    if (theta > 1.0) n.fail("theta", "must lie in (0, 1] for a concave profile");
    const double scale = n.positive("scale", 1.0), shift = n.number("shift", 0.0), offset = n.number("offset", 0.0);
    return kind == "power" ? ConcaveFn::power(theta, scale, shift, offset) : ConcaveFn::log_power(theta, scale, shift, offset);
  }
  if (kind == "log1p") {
    n.allow({"kind", "scale", "offset"});
    return ConcaveFn::log1p(n.positive("scale", 1.0), n.number("offset", 0.0));
  }
  n.fail("kind", "unknown profile '" + kind + "' (power, log_power, log1p)");
}

DecreasingFn parse_g(Node n, int k) {
  const std::string family = n.string("family");
  try {
    if (family == "power_law") {
      n.allow({"family", "C", "b"});
      return DecreasingFn::power_law(n.positive("C", 1.0), n.positive("b"));
    }
    if (family == "log_power") {
      n.allow({"family", "b", "eps_scale"});
      return DecreasingFn::log_power(n.positive("b"), n.positive("eps_scale", 1.0));
    }
    if (family == "exp_power") {
      n.allow({"family", "alpha"});
      return DecreasingFn::exp_power(n.positive("alpha"));
    }
    if (family == "psi_eta") {
      n.allow({"family", "psi"});
      return DecreasingFn::psi_eta(parse_psi(n.child("psi")), k);
    }
    if (family == "eta") {
      n.allow({"family"});
      return fundamental_eta(k);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    n.fail(e.what());
  }
  n.fail("family", "unknown family '" + family + "' (power_law, log_power, exp_power, psi_eta, eta)");
}

TestFunctionSpec parse_u(Node n, int k) {
  n.allow({"type", "poles", "zeros", "weights", "log_scale", "calibrate", "scale", "budget"});
  TestFunctionSpec u;
  const std::string type = n.string("type", "none");
  if (type == "none") {
    u.kind = TestFunctionSpec::Kind::None;
  } else if (type == "calibrated_kernel") {
    u.kind = TestFunctionSpec::Kind::CalibratedKernel;
    u.poles = n.points("poles", k, std::vector<Point>{});
  } else if (type == "kernel_sum") {
    u.kind = TestFunctionSpec::Kind::KernelSum;
    u.poles = n.points("poles", k);
    u.weights = n.numbers("weights");
    if (u.weights.size() != u.poles.size()) n.fail("weights", "needs one weight per pole");
    for (double w : u.weights)
      if (!(w > 0.0)) n.fail("weights", "weights must be positive");
  } else if (type == "log_modulus") {
    if (k != 2) n.fail("type", "log_modulus needs dim 2");
    u.kind = TestFunctionSpec::Kind::LogModulus;
    u.poles = n.points("poles", k, std::vector<Point>{});
    u.zeros = n.points("zeros", k, std::vector<Point>{});
    u.calibrate = n.boolean("calibrate", true);
    u.log_scale = n.number("log_scale", 0.0);
  } else {
    n.fail("type", "unknown test function '" + type + "' (none, calibrated_kernel, kernel_sum, log_modulus)");
  }
  u.scale = n.positive("scale", 1.0);
  u.budget = n.integer("budget", 200000, 1000, 100000000);
  return u;
}

}  // namespace

Config parse_config(const std::string& text, const Overrides& ov, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigFieldError("/", std::string("malformed JSON in ") + origin + ": " + e.what());
  }
  Node root(doc, "");
  root.allow({"schema_version", "name", "dim", "seed", "region", "A", "B", "g", "alpha", "outside_value", "u", "grid",
              "lipschitz", "admissible", "domar", "controls", "planted", "perron", "admissibility", "improve",
              "compare", "description"});
  if (!doc.contains("schema_version")) root.fail("schema_version", "required field missing");
  if (root.integer("schema_version", 0, 1000) != kSchemaVersion)
    root.fail("schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
  if (root.has("description")) root.string("description");

  Config cfg;
  cfg.path = origin;
  Scenario& s = cfg.scenario;
  s.name = root.string("name");
  if (s.name.empty() || s.name.find_first_of("/\\ ") != std::string::npos)
    root.fail("name", "must be non-empty without slashes or spaces");
  const int k = static_cast<int>(root.integer("dim", 2, 3));
  s.k = k;
  if (ov.seed) doc["seed"] = *ov.seed;
  if (doc.contains("seed") && !(doc["seed"].is_number_unsigned() || doc["seed"].is_number_integer()))
    root.fail("seed", "expected a non-negative integer");
  if (!doc.contains("seed")) doc["seed"] = 1;
  if (doc["seed"].is_number_integer() && doc["seed"].get<long long>() < 0) root.fail("seed", "must be non-negative");
  s.seed = doc["seed"].get<std::uint64_t>();

  s.omega = parse_region(root.child("region"), k);
  s.A = parse_set(root.child("A"), k);
  s.B = parse_set(root.child("B"), k);
  s.g = parse_g(root.child("g"), k);
  s.alpha = root.positive("alpha", kInfinity);
  if (root.has("outside_value")) s.outside_value = root.number("outside_value");
  if (s.outside_value && !std::isfinite(s.alpha)) root.fail("outside_value", "needs a finite alpha");

  // B must meet the region; A must lie inside it.
  {
    Point lo, hi;
    s.omega.bounding_box(lo, hi);
    bool meets = false;
    for (const auto& p : s.B.sample(s.B.default_resolution()))
      if (s.omega.contains(p)) meets = true;
    if (!meets) root.fail("B", "B does not meet the region");
    for (const auto& p : s.A.sample(s.A.default_resolution()))
      if (!s.omega.contains(p)) root.fail("A", "A leaves the region at " + format_double(p[0]) + ", " + format_double(p[1]));
  }

  if (!doc.contains("u")) doc["u"] = json::object();
  s.u = parse_u(root.child("u"), k);

  if (!doc.contains("grid")) doc["grid"] = json::object();
  {
    Node g = root.child("grid");
    g.allow({"nodes", "c_disc", "tol", "over_relax"});
    if (ov.grid) doc["grid"]["nodes"] = *ov.grid;
    if (ov.tol) doc["grid"]["tol"] = *ov.tol;
    s.grid.nodes = static_cast<int>(g.integer("nodes", k == 2 ? 257 : 65, 5, 2049));
    s.grid.c_disc = g.number("c_disc", 1.0);
    if (!(s.grid.c_disc >= 0.0)) g.fail("c_disc", "must be non-negative");
    s.grid.tol = g.number("tol", 0.0);
    if (!(s.grid.tol >= 0.0)) g.fail("tol", "must be non-negative");
    s.grid.over_relax = g.boolean("over_relax", true);
  }

  if (auto n = root.optional_child("lipschitz")) {
    n->allow({"L", "R", "anchors", "convexity", "beta", "barrier_samples"});
    LipschitzSpec ls;
    ls.chart.L = n->positive("L");
    ls.chart.R = n->positive("R");
    ls.anchors = n->points("anchors", k, std::vector<Point>{});
    for (std::size_t i = 0; i < ls.anchors.size(); ++i)
      if (s.A.dist(ls.anchors[i]) > 1e-6 * ls.chart.R)
        throw ConfigFieldError(n->at("anchors") + "/" + std::to_string(i), "anchor does not lie on A");
    ls.convexity = n->boolean("convexity", false);
    ls.beta = n->positive("beta", 1.0);
    ls.barrier_samples = n->integer("barrier_samples", 2000, 16, 10000000);
    s.lipschitz = ls;
  }
  if (auto n = root.optional_child("admissible")) {
    n->allow({"a", "p_star", "C", "power_type"});
    AdmissibleSpec as;
    as.a = n->number("a", std::numbers::e);
    if (!(as.a > 1.0)) n->fail("a", "must exceed 1");
    as.p_star = n->number("p_star");
    if (!(as.p_star >= 0.0 && as.p_star < k)) n->fail("p_star", "must lie in [0, dim)");
    if (n->has("C")) as.C = n->positive("C");
    else n->raw("C") = nullptr;
    as.power_type = n->boolean("power_type", false);
    s.admissible = as;
  }
  if (auto n = root.optional_child("domar")) {
    n->allow({"a", "eps", "lambda", "p_star", "C", "samples", "constant", "ray_origin", "ray_direction"});
    DomarSpec d;
    d.a = n->number("a", std::numbers::e);
    if (!(d.a > 1.0)) n->fail("a", "must exceed 1");
    d.eps = n->positive("eps");
    d.lambda = static_cast<int>(n->integer("lambda", 1, 1, 8));
    d.p_star = n->number("p_star");
    if (!(d.p_star > 0.0 && d.p_star < k)) n->fail("p_star", "must lie in (0, dim)");
    if (n->has("C")) d.C = n->positive("C");
    else n->raw("C") = nullptr;
    d.samples = n->integer("samples", 200000, 1000, 100000000);
    if (n->has("constant")) d.constant = n->positive("constant");
    else n->raw("constant") = nullptr;
    if (s.outside_value) n->fail("domar bounds need the composed obstacle; remove outside_value");
    Point lo, hi;
    s.omega.bounding_box(lo, hi);
    d.ray_origin = n->point("ray_origin", k, 0.5 * (lo + hi));
    if (!s.omega.contains(d.ray_origin)) n->fail("ray_origin", "must lie inside the region");
    Point e0{};
    e0[0] = 1.0;
    d.ray_direction = n->point("ray_direction", k, e0);
    if (norm(d.ray_direction) == 0.0) n->fail("ray_direction", "must be non-zero");
    s.domar = d;
  }
  if (!doc.contains("controls")) doc["controls"] = json::object();
  {
    Node c = root.child("controls");
    c.allow({"tau_factor", "corrupt_factor"});
    s.controls.tau_factor = c.positive("tau_factor", 1.0);
    s.controls.corrupt_factor = c.number("corrupt_factor", 0.0);
    if (!(s.controls.corrupt_factor >= 0.0)) c.fail("corrupt_factor", "must be non-negative");
  }
  if (!doc.contains("planted")) doc["planted"] = json::array();
  if (!doc["planted"].is_array()) root.fail("planted", "expected an array of assertion names");
  for (std::size_t i = 0; i < doc["planted"].size(); ++i) {
    if (!doc["planted"][i].is_string()) throw ConfigFieldError("/planted/" + std::to_string(i), "expected a string");
    s.planted.push_back(doc["planted"][i].get<std::string>());
  }

  if (!doc.contains("perron")) doc["perron"] = json::object();
  {
    Node p = root.child("perron");
    p.allow({"obstacle_csv", "free_near_B", "oracle", "oracle_tol"});
    cfg.perron.obstacle_csv = p.string("obstacle_csv", "");
    if (!cfg.perron.obstacle_csv.empty() && std::filesystem::path(cfg.perron.obstacle_csv).is_relative() &&
        origin != "<string>")
      cfg.perron.obstacle_csv =
          (std::filesystem::path(origin).parent_path() / cfg.perron.obstacle_csv).lexically_normal().string();
    cfg.perron.free_near_B = p.boolean("free_near_B", false);
    cfg.perron.oracle = p.boolean("oracle", true);
    cfg.perron.oracle_tol = p.positive("oracle_tol", 1e-12);
  }
  if (!doc.contains("admissibility")) doc["admissibility"] = json::object();
  {
    Node a = root.child("admissibility");
    a.allow({"set", "p_star", "sigmas", "radii", "centers", "samples_per_probe", "scale_pairs", "assouad_centers"});
    auto& ad = cfg.admissibility;
    ad.set = a.string("set", "A");
    if (ad.set != "A" && ad.set != "B" && ad.set != "S") a.fail("set", "expected A, B or S");
    const double pdef = s.admissible ? s.admissible->p_star : 1.0;
    ad.p_star = a.number("p_star", pdef);
    if (!(ad.p_star >= 0.0 && ad.p_star < k)) a.fail("p_star", "must lie in [0, dim)");
    const SetDescr& target = ad.set == "A" ? s.A : ad.set == "B" ? s.B : s.A;
    ad.schedule = default_probe_schedule(ad.set == "S" ? SetDescr::union_of({s.A, s.B}) : target);
    if (a.has("sigmas")) {
      ad.schedule.sigmas = a.numbers("sigmas");
      ad.default_schedule = false;
    }
    if (a.has("radii")) {
      ad.schedule.radii = a.numbers("radii");
      ad.default_schedule = false;
    }
    if (a.has("centers")) {
      ad.schedule.centers = a.points("centers", k);
      ad.default_schedule = false;
    }
    ad.schedule.samples_per_probe = a.integer("samples_per_probe", ad.schedule.samples_per_probe, 100, 100000000);
    for (double v : ad.schedule.sigmas)
      if (!(v > 0.0)) a.fail("sigmas", "must be positive");
    for (double v : ad.schedule.radii)
      if (!(v > 0.0)) a.fail("radii", "must be positive");
    if (!a.has("scale_pairs")) a.raw("scale_pairs") = json::array();
    json& pairs = a.raw("scale_pairs");
    if (!pairs.is_array()) a.fail("scale_pairs", "expected an array of [R, r] pairs");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::string ptr = a.at("scale_pairs") + "/" + std::to_string(i);
      if (!pairs[i].is_array() || pairs[i].size() != 2) throw ConfigFieldError(ptr, "expected [R, r]");
      const double R = Node::as_number(pairs[i][0], ptr + "/0"), r = Node::as_number(pairs[i][1], ptr + "/1");
      if (!(r > 0.0 && R > r)) throw ConfigFieldError(ptr, "needs 0 < r < R");
      ad.scale_pairs.emplace_back(R, r);
    }
    ad.assouad_centers = static_cast<int>(a.integer("assouad_centers", 32, 1, 100000));
  }
  if (!doc.contains("improve")) doc["improve"] = json::object();
  {
    Node m = root.child("improve");
    m.allow({"points", "exponent_t_lo", "exponent_t_hi"});
    cfg.improve.points = static_cast<int>(m.integer("points", 200, 2, 1000000));
    cfg.improve.exponent_t_lo = m.positive("exponent_t_lo", 1e-4);
    cfg.improve.exponent_t_hi = m.positive("exponent_t_hi", 1e-2);
    if (!(cfg.improve.exponent_t_hi > cfg.improve.exponent_t_lo)) m.fail("exponent_t_hi", "must exceed exponent_t_lo");
  }
  if (!doc.contains("compare")) doc["compare"] = json::object();
  {
    Node c = root.child("compare");
    c.allow({"points"});
    cfg.compare_points = static_cast<int>(c.integer("points", 40, 3, 100000));
  }
  if (!doc.contains("alpha")) doc["alpha"] = "inf";
  cfg.resolved_json = doc.dump();
  s.resolved_json = cfg.resolved_json;
  return cfg;
}

Config load_config(const std::string& path, const Overrides& ov) {
  std::ifstream in(path);
  if (!in) throw ConfigFieldError("/", "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), ov, path);
}

std::vector<std::string> expand_config_paths(const std::string& path) {
  namespace fs = std::filesystem;
  std::vector<std::string> out;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::directory_iterator(path))
      if (e.is_regular_file() && e.path().extension() == ".json" && e.path().filename() != "index.json")
        out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    if (out.empty()) throw ConfigFieldError("/", "no *.json scenario files in " + path);
    return out;
  }
  std::ifstream in(path);
  if (!in) throw ConfigFieldError("/", "cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigFieldError("/", std::string("malformed JSON in ") + path + ": " + e.what());
  }
  if (doc.is_object() && doc.contains("scenarios")) {
    const auto& arr = doc["scenarios"];
    if (!arr.is_array() || arr.empty()) throw ConfigFieldError("/scenarios", "expected a non-empty array of paths");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string()) throw ConfigFieldError("/scenarios/" + std::to_string(i), "expected a path");
      fs::path p = arr[i].get<std::string>();
      if (p.is_relative()) p = fs::path(path).parent_path() / p;
      out.push_back(p.lexically_normal().string());
    }
    return out;
  }
  out.push_back(path);
  return out;
}

}  // namespace growthbound
