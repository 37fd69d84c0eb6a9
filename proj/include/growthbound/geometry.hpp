#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "growthbound/common.hpp"
#include "growthbound/rng.hpp"

namespace growthbound {

using Matrix3 = std::array<std::array<double, 3>, 3>;

Matrix3 identity3();
Point apply(const Matrix3& m, const Point& x);
Point apply_transpose(const Matrix3& m, const Point& x);
/// Max entry of |U^T U - I| over the leading k x k block.
double orthogonality_defect(const Matrix3& u, int k);
/// Rotation by angle (radians) in the (x0, x1) plane.
Matrix3 plane_rotation(double angle);

/// Bounded open set Omega.
class Region {
 public:
  struct Box {
    Point lo, hi;
  };
  struct Ball {
    Point center;
    double radius;
  };
  struct Union {
    std::vector<Region> members;
  };
  using Shape = std::variant<Box, Ball, Union>;

  static Region box(const Point& lo, const Point& hi, int k);
  static Region ball(const Point& center, double radius, int k);
  static Region union_of(std::vector<Region> members);

  int dim() const;
  const Shape& shape() const;
  bool contains(const Point& x) const;
  /// Distance to the boundary; throws OutsideRegion for x outside.
  double boundary_dist(const Point& x) const;
  void bounding_box(Point& lo, Point& hi) const;
  /// Lebesgue measure. Exact for boxes and balls; unions use a fixed-seed
  /// Monte Carlo count with 2e6 samples.
  double volume() const;
  /// Radius of the largest ball inside the region (exact for box and ball).
  double inradius() const;
  Point sample(Rng& rng) const;
  std::string describe() const;

  struct Rep;

 private:
  explicit Region(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

double boundary_dist(const Point& x, const Region& omega);

/// Graph of a Lipschitz map over one chart variable (p = 1), stored as samples
/// (s_i, phi(s_i)) in chart coordinates. World point: anchor + U^T (s, phi(s)).
struct LipGraphData {
  std::vector<double> s;
  std::vector<Point> phi;  // first k-1 entries used
  double L = 2.0;
  Matrix3 rotation = identity3();
  Point anchor{};
};

/// Compact set descriptor with an exact or sampled distance oracle.
class SetDescr {
 public:
  struct PointCloud {
    std::vector<Point> points;
  };
  struct Polyline {
    std::vector<Point> vertices;
  };
  struct CantorDust {
    int corners;  // 2^j: the first j axes are split, remaining axes collapse to lo
    double ratio;
    int depth;
    Point lo, hi;
  };
  struct Union {
    std::vector<SetDescr> members;
  };
  using Shape = std::variant<PointCloud, Polyline, LipGraphData, CantorDust, Union>;

  static SetDescr point_cloud(std::vector<Point> points, int k);
  static SetDescr polyline(std::vector<Point> vertices, int k);
  static SetDescr lip_graph(LipGraphData data, int k);
  static SetDescr cantor_dust(int corners, double ratio, int depth, const Point& lo, const Point& hi, int k);
  static SetDescr union_of(std::vector<SetDescr> members);

  int dim() const;
  const Shape& shape() const;
  double dist(const Point& x) const;
  void bounding_box(Point& lo, Point& hi) const;
  /// Points of the set with spacing about `spacing` (leaf centres for dust).
  std::vector<Point> sample(double spacing) const;
  /// Default sampling resolution used by covering-number queries.
  double default_resolution() const;
  std::string describe() const;

  struct Rep;

 private:
  explicit SetDescr(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

double dist_to_set(const Point& x, const SetDescr& s);

/// Sawtooth chart: phi(s) = slope * triangle wave of the given period, over [s_lo, s_hi].
LipGraphData sawtooth_graph(double s_lo, double s_hi, double slope, double period, double spacing, double L,
                            const Point& anchor = Point{}, const Matrix3& rotation = identity3());
/// Straight graph phi(s) = slope * s over [s_lo, s_hi].
LipGraphData linear_graph(double s_lo, double s_hi, double slope, double spacing, double L,
                          const Point& anchor = Point{}, const Matrix3& rotation = identity3());

/// Monte Carlo estimate with its standard error and provenance.
struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n = 0;
  std::uint64_t seed = 0;
};

/// m({y in B(x,R) : 0 < dist(y,G) <= sigma}). Samples are drawn uniformly from
/// the part of B(x,R) inside the sigma-expanded bounding box of G, which holds
/// the whole tube. Shards use derived seeds; result depends on (seed, shards).
MCEstimate tube_measure(const SetDescr& g, double sigma, const Point& x, double radius, long n, std::uint64_t seed,
                        int shards = 1);

struct ProbeSchedule {
  std::vector<double> sigmas;
  std::vector<double> radii;
  std::vector<Point> centers;
  long samples_per_probe = 20000;
};

/// 5 x 5 log grid sigma in [1e-3, 1e-1], R in [1e-2, 1]; 3^k lattice of
/// centres over the bounding box of G.
ProbeSchedule default_probe_schedule(const SetDescr& g);

struct AdmissibilityEstimate {
  double p_star = 0.0;
  double q_star = 0.0;
  double C_hat = 0.0;
  long samples_per_probe = 0;
  long probes = 0;
  double worst_sigma = 0.0, worst_radius = 0.0;
  Point worst_center{};
  double worst_ratio_std_error = 0.0;
  ProbeSchedule schedule;
  /// C_1 = max(C_hat, 1).
  double C1() const { return C_hat > 1.0 ? C_hat : 1.0; }
};

AdmissibilityEstimate admissibility_constant(const SetDescr& g, double p_star, const ProbeSchedule& schedule,
                                             std::uint64_t seed);
/// A user-supplied constant, for sets whose constant is known analytically.
AdmissibilityEstimate admissibility_given(double C, double p_star, int k);

/// Farthest-point prefix cover count of a fixed fine sample of G by closed
/// r-balls. Non-increasing in r by construction.
long covering_number(const SetDescr& g, double r, double spacing = 0.0);
/// Same, restricted to G inside the open ball B(x, R).
long covering_number_local(const std::vector<Point>& sample, const Point& x, double radius, double r);

/// Largest least-squares slope of log N_r(B(x,R) n G) against log(R/r) over
/// `n_centers` sample centres. Throws InsufficientScales for < 3 pairs.
double assouad_estimate(const SetDescr& g, const std::vector<std::pair<double, double>>& scale_pairs,
                        int n_centers = 32, std::uint64_t seed = 1, double spacing = 0.0);

struct ChartParams {
  double L = 2.0;
  double R = 0.1;
};
void validate_chart_params(const ChartParams& p, double alpha);

/// A graph chart of A around one of its points, in the frame x_chart = U (x - origin).
/// phi is sampled over chart coordinates s (first component); values in entries 1..k-1.
struct LocalChart {
  Matrix3 U = identity3();
  Point origin{};
  std::vector<double> s;
  std::vector<Point> phi;
  int k = 2;
  double max_slope = 0.0;

  Point to_chart(const Point& x) const;
  Point to_world(const Point& c) const;
  /// Piecewise-linear phi(s) (entries 1..k-1), clamped outside the samples.
  Point phi_at(double s) const;
};

/// Chart of A in a cylinder around the world point `a` (must lie on A up to sampling).
LocalChart local_chart(const SetDescr& a, const Point& anchor, const ChartParams& params);

struct ChartReport {
  int anchors = 0;
  double max_slope = 0.0;
  long sandwich_samples = 0;
  double worst_lower_slack = kInfinity;  // min of dist - |x''-phi(x')|/(L+1)
  double worst_upper_slack = kInfinity;  // min of |x''-phi(x')| - dist
  bool pass = true;
  std::string message;
};

/// Graph and Lipschitz test inside C(a, R, 3LR) at every anchor plus the
/// chart-distance sandwich on the boundary of D_{a,r}, r = R/(16L).
ChartReport chart_report(const SetDescr& a, const ChartParams& params, const std::vector<Point>& anchors);
/// As chart_report, throwing ChartViolation on failure.
ChartReport lipschitz_chart_check(const SetDescr& a, const ChartParams& params, const std::vector<Point>& anchors);

/// Boundary of D_{a,r} = C(a, r, 2.5 L r) in chart frame, deterministic stratified samples.
std::vector<Point> chart_domain_boundary(const LocalChart& chart, double s_center, double r, double L, long n);

}  // namespace growthbound
