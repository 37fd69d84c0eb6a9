#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "growthbound/domar.hpp"
#include "growthbound/geometry.hpp"
#include "growthbound/monotone.hpp"
#include "growthbound/perron.hpp"
#include "growthbound/selfimprove.hpp"

namespace growthbound {

/// Subharmonic test function u on R^k.
class TestFunction {
 public:
  /// u(x) = sum_j c_j eta(|x - b_j|).
  struct KernelSum {
    std::vector<double> weights;
    std::vector<Point> poles;
  };
  /// u(z) = log|f(z)| for f(z) = e^{log_scale} prod (z - z_i) / prod (z - p_j), k = 2.
  struct LogModulus {
    std::vector<Point> zeros;
    std::vector<Point> poles;
    double log_scale = 0.0;
  };
  struct Custom {
    std::string label;
    std::function<double(const Point&)> fn;
  };
  using Kind = std::variant<KernelSum, LogModulus, Custom>;

  static TestFunction kernel_sum(std::vector<double> weights, std::vector<Point> poles, int k);
  static TestFunction log_modulus(std::vector<Point> zeros, std::vector<Point> poles, double log_scale);
  static TestFunction custom(std::string label, std::function<double(const Point&)> fn, int k);

  double operator()(const Point& x) const;
  /// Same function times c (a negative-control device).
  TestFunction scaled(double c) const;
  const Kind& kind() const { return kind_; }
  int dim() const { return k_; }
  double factor() const { return factor_; }
  std::string type_name() const;
  std::string describe() const;

 private:
  TestFunction(Kind kind, int k) : kind_(std::move(kind)), k_(k) {}
  Kind kind_;
  int k_;
  double factor_ = 1.0;
};

struct Calibration {
  TestFunction u = TestFunction::kernel_sum({}, {}, 2);
  double c = 0.0;           // uniform weight (kernel) or log scale (log modulus)
  double min_margin = 0.0;  // min of g(dist(x,B)) - u(x) over the sample
  Point witness{};
  long samples = 0;
};

/// Sample of {0 < dist(x, B) < alpha} for a finite B: log-spaced shells around each
/// point, uniform points of the alpha-neighbourhood, and their projections onto
/// the bisectors of the two nearest points.
/// With `within`, points outside that region are dropped and an infinite alpha is
/// replaced by the diameter of its bounding box.
std::vector<Point> calibration_sample(const std::vector<Point>& points, double alpha, int k, long budget,
                                      std::uint64_t seed, const Region* within = nullptr);

/// Largest uniform c with c sum_j eta(|x - b_j|) <= g(dist(x, B)) on the calibration
/// sample: the smallest ratio g/u_1, stepped down until every sample passes.
/// Throws CalibrationFailed when c = 1e-6 already fails.
Calibration calibrate_kernel(const std::vector<Point>& poles, const DecreasingFn& g, double alpha, int k,
                             long budget = 200000, std::uint64_t seed = 1, const Region* within = nullptr);
/// Largest log scale with log|f| <= g(dist(x, B)) on the calibration sample of the poles.
Calibration calibrate_log_modulus(const std::vector<Point>& zeros, const std::vector<Point>& poles,
                                  const DecreasingFn& g, double alpha, long budget = 200000, std::uint64_t seed = 1,
                                  const Region* within = nullptr);

/// Sub-mean check of u at nodes with a full stencil in the region, more than
/// `pole_cells` spacings from every pole. The tolerance at a node is the Taylor
/// bound h^4 M4 / 24 on the five-point consistency error of a harmonic kernel,
/// M4 = sum_j |w_j| c_k / (r_j - h)^(k+2) with c_2 = 6, c_3 = 24 (infinite when r_j <= h).
SubharmonicReport test_function_subharmonic(const TestFunction& u, const Grid& grid, double pole_cells = 2.0);

/// Values of u at the grid nodes (NaN at ghosts).
std::vector<double> node_values(const TestFunction& u, const Grid& grid);

/// g(dist(x, S)) - u(x) at non-ghost nodes with 0 < dist(x, S) < alpha. No allowance.
MarginReport hypothesis_check(const TestFunction& u, const DecreasingFn& g, const SetDescr& S, const Grid& grid,
                              double alpha);

/// h(dist(x, B)) - value at non-ghost nodes with 0 < dist(x, B) < tau_factor * h.tau;
/// a violation is a margin below -c_disc sqrt(h/diam) |F| (c_disc = 0: any negative margin).
/// Margins come from a LowerStepTable of h and are recomputed with the exact h wherever
/// the table value would count as a violation, so min_margin is a lower bound.
MarginReport conclusion_check(const std::vector<double>& values, const std::vector<double>& F,
                              const ImprovedBound& h, const SetDescr& B, const Grid& grid, double c_disc = 0.0,
                              double tau_factor = 1.0);
MarginReport conclusion_check(const TestFunction& u, const ImprovedBound& h, const SetDescr& B, const Grid& grid,
                              double tau_factor = 1.0);

/// Step minorant of a non-increasing function: the value at the next knot to the right
/// on an n-point log grid of [lo, hi]; exact outside [lo, hi].
class LowerStepTable {
 public:
  LowerStepTable(std::function<double(double)> f, double lo, double hi, int n = 4096);
  double operator()(double t) const;
  double exact(double t) const { return f_(t); }

 private:
  std::function<double(double)> f_;
  std::vector<double> t_, v_;
};

struct BarrierReport {
  Point anchor{}, y{}, z{};
  double r = 0.0;
  long samples = 0;
  long lemma_checked = 0;
  double lemma_margin = kInfinity;  // min of v(x) - g(r) - g(dist(x,A))
  Point lemma_witness{};
  double sandwich_margin = kInfinity;  // min of dist - vert/(L+1) and vert - dist
  Point sandwich_witness{};
  double cross_margin = kInfinity;  // min of (4L+2) r - max(|x-y|, |x-z|)
  Point cross_witness{};
  bool lemma_ok = true, sandwich_ok = true, cross_ok = true;
  bool pass() const { return lemma_ok && sandwich_ok && cross_ok; }
  std::string message;
};

/// Samples the boundary of D_{a,r} = C(a, r, 2.5 L r) in the chart of A at `anchor`,
/// with crossings y, z on the lateral faces, and evaluates the barrier inequality
/// (skipping samples within 1e-3 r of y and z), the chart sandwich and the
/// (4L+2) r cross-bound. ArgumentError unless r < R/(8L) and the anchor lies on A.
BarrierReport barrier_report(const DecreasingFn& g, const SetDescr& A, const ChartParams& params, const Point& anchor,
                             double r, long samples = 10000);
/// As barrier_report; throws BarrierViolation naming the first failed assertion and its witness.
BarrierReport barrier_check(const DecreasingFn& g, const SetDescr& A, const ChartParams& params, const Point& anchor,
                            double r, long samples = 10000);

// ---------------------------------------------------------------- scenarios

struct TestFunctionSpec {
  enum class Kind { None, CalibratedKernel, KernelSum, LogModulus };
  Kind kind = Kind::None;
  std::vector<Point> poles;  // empty: the points of B (calibrated kernel)
  std::vector<Point> zeros;
  std::vector<double> weights;
  double log_scale = 0.0;
  bool calibrate = true;  // log modulus: fit the log scale
  double scale = 1.0;     // applied after calibration
  long budget = 200000;
};

struct GridSpec {
  int nodes = 129;
  double c_disc = 1.0;
  double tol = 0.0;         // 0: 1e-8 * cap
  bool over_relax = true;   // optimal relaxation, then plain sweeps
};

struct LipschitzSpec {
  ChartParams chart;
  std::vector<Point> anchors;
  bool convexity = false;
  double beta = 1.0;
  long barrier_samples = 2000;
};

struct AdmissibleSpec {
  double a = std::numbers::e;
  double p_star = 1.0;
  double C = std::numeric_limits<double>::quiet_NaN();  // NaN: Monte Carlo estimate
  bool power_type = false;
};

struct DomarSpec {
  double a = std::numbers::e;
  double eps = 1.0;
  int lambda = 1;
  double p_star = 1.0;
  double C = std::numeric_limits<double>::quiet_NaN();  // admissibility of A u B; NaN: estimate
  long samples = 200000;
  /// Finite: the obstacle is this constant instead of g(dist(x, A u B)); Theorem B then
  /// uses the measured mu.
  double constant = std::numeric_limits<double>::quiet_NaN();
  Point ray_origin{};
  Point ray_direction{1.0, 0.0, 0.0};
};

struct ControlSpec {
  double tau_factor = 1.0;      // > 1 adds perron-vs-h checks on the inflated radius
  double corrupt_factor = 0.0;  // > 0 adds a check against corrupt_factor * g(dist(x, B))
};

struct Scenario {
  std::string name = "scenario";
  int k = 2;
  std::uint64_t seed = 1;
  Region omega = Region::box({0, 0, 0}, {1, 1, 0}, 2);
  SetDescr A = SetDescr::point_cloud({{0.25, 0.5, 0}}, 2);
  SetDescr B = SetDescr::point_cloud({{0.75, 0.5, 0}}, 2);
  DecreasingFn g = DecreasingFn::power_law(1.0, 1.0);
  double alpha = kInfinity;             // hypothesis radius
  std::optional<double> outside_value;  // obstacle where dist(x, A u B) >= alpha
  TestFunctionSpec u;
  GridSpec grid;
  std::optional<LipschitzSpec> lipschitz;
  std::optional<AdmissibleSpec> admissible;
  std::optional<DomarSpec> domar;
  ControlSpec controls;
  std::vector<std::string> planted;  // assertion names expected to fail
  std::string resolved_json;         // config with defaults filled in
};

struct Assertion {
  std::string name;
  bool passed = true;
  double min_margin = std::numeric_limits<double>::quiet_NaN();
  Point witness{};
  long compared = 0;
  long violations = 0;
  std::string detail;
};

struct PerronRun {
  std::string mode;
  long iterations = 0;
  double residual = 0.0;
  bool converged = false;
  double active_fraction = 0.0;
  double seconds = 0.0;
};

struct Report {
  std::string scenario;
  std::uint64_t seed = 0;
  int k = 2;
  int grid_nodes = 0;
  double spacing = 0.0;
  std::string u_type;
  double hypothesis_margin = kInfinity;
  Point hypothesis_witness{};
  std::vector<Assertion> assertions;
  std::vector<std::string> planted;
  std::vector<std::string> unexpected;  // failed but not planted
  std::vector<std::string> missing;     // planted but passed
  std::vector<std::string> notes;
  std::vector<ImprovedBound> bounds;
  std::vector<PerronRun> perron;
  double seconds = 0.0;

  /// Exactly the planted assertions failed.
  bool pass() const { return unexpected.empty() && missing.empty(); }
  long violations() const;
};

struct RunOptions {
  std::string out_dir;  // empty: nothing written
  int grid_nodes = 0;   // > 0 overrides the scenario grid
  double tol = 0.0;     // > 0 overrides the scenario tolerance
  std::string stamp;    // first line of every CSV ("# ..."); empty: none
};

/// Calibration and hypothesis check, the selfimprove pipelines configured in the
/// scenario, conclusion checks for u, perron minorants (free near B for h, whole
/// region for the Domar bounds), barrier checks at the chart anchors, and controls.
/// Writes report.json, report.txt and margins.csv under out_dir/name when set.
Report run_scenario(const Scenario& s, const RunOptions& opts = {});

/// Admissibility data of A for the admissible pipeline: the configured constant, or
/// a Monte Carlo estimate on seed stream 29.
AdmissibilityEstimate scenario_admissibility(const Scenario& s);
/// Smallest boundary distance over a sample of A.
double scenario_dist_A_boundary(const Scenario& s);

/// Improved bounds of the configured selfimprove pipelines; unavailable upgrades
/// (UpgradeUnavailable, LimitDiverges) become notes.
std::vector<ImprovedBound> scenario_bounds(const Scenario& s, std::vector<std::string>& notes);

std::string report_json(const Report& r, const Scenario& s);
std::string report_text(const Report& r);

/// Row of the A-versus-B comparison.
struct CompareRow {
  double boundary_dist = 0.0;
  double bound_A = 0.0, bound_B = 0.0, ratio = 0.0;
};
struct Comparison {
  std::vector<CompareRow> rows;  // ordered toward the boundary
  bool ratio_increasing = false;
  double resolved_level = 0.0;   // largest sampled obstacle value
  double stop_distance = 0.0;
};

/// Domar majorants of the uncapped obstacle along the scenario ray toward the boundary,
/// at n points with boundary distance log-spaced from the origin's down to the larger of
/// 1e-4 of the inradius and the distance where bound_A reaches 10% of the largest
/// sampled obstacle value (the sampled distribution function vanishes above it).
/// Both bounds are capped at the supremum of the obstacle.
Comparison compare_bounds(const Scenario& s, int n = 40);
void write_comparison_csv(const Comparison& c, const std::string& path, const std::string& stamp = "");

/// Theorem A and B majorants for a scenario's capped obstacle.
struct DomarPair {
  TheoremAMajorant A;
  TheoremBMajorant B;
  double C_S = 0.0;
  double resolved_level = 0.0;  // largest finite sampled obstacle value
  double sup_F = 0.0;           // +inf unless the obstacle is capped or constant
};
DomarPair domar_majorants(const Scenario& s, double spacing);

/// Obstacle of a scenario at a point: min(g(dist), cap) within alpha, the outside value beyond.
std::function<double(const Point&)> scenario_obstacle(const Scenario& s, double cap);
/// g at the grid spacing: the obstacle cap.
double scenario_cap(const Scenario& s, double spacing);

}  // namespace growthbound
