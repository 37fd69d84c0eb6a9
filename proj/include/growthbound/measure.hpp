#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "growthbound/geometry.hpp"
#include "growthbound/monotone.hpp"

namespace growthbound {

/// Nonnegative upper semicontinuous F on a region, possibly +inf.
class Majorant {
 public:
  /// x -> g(dist(x, S)), +inf on S.
  struct Composed {
    DecreasingFn g;
    SetDescr set;
  };
  /// Multilinear interpolation of node values on a lattice over [lo, hi]; clamped outside.
  struct Grid {
    Point lo, hi;
    std::array<int, 3> nodes{1, 1, 1};
    std::vector<double> values;  // x0 fastest
  };
  /// x -> profile(|(x_0..x_{q-1}) - center|); depends on the first q coordinates only.
  struct Product {
    DecreasingFn profile;
    int q;
    Point center;
  };
  struct Custom {
    std::string label;
    std::function<double(const Point&)> fn;
  };
  using Kind = std::variant<Composed, Grid, Product, Custom>;

  static Majorant composed(const DecreasingFn& g, const SetDescr& s);
  static Majorant grid(const Point& lo, const Point& hi, std::array<int, 3> nodes, std::vector<double> values, int k);
  static Majorant product(const DecreasingFn& profile, int q, const Point& center, int k);
  static Majorant custom(std::string label, std::function<double(const Point&)> fn, int k);

  Majorant with_cap(double cap) const;

  double operator()(const Point& x) const;
  /// min(F(x), cap); equals F(x) when no cap is set.
  double capped(const Point& x) const;
  std::optional<double> cap() const { return cap_; }
  int dim() const { return k_; }
  const Kind& kind() const { return kind_; }
  std::string describe() const;

 private:
  Majorant(Kind kind, int k) : kind_(std::move(kind)), k_(k) {}
  Kind kind_;
  int k_;
  std::optional<double> cap_;
};

/// g extended to [0, inf): +inf at or left of an open left end, the
/// right-end value (or limit) beyond the domain.
double eval_extended(const DecreasingFn& g, double t);

/// Distribution function s -> m({F > s}) of a majorant over a region.
struct DistFn {
  DecreasingFn f = DecreasingFn::tabulated({{1.0, 0.0}, {2.0, 0.0}});
  std::vector<double> s_grid;
  std::vector<double> values;
  double omega_measure = 0.0;
  double max_finite = 0.0;          // largest finite sampled value
  double infinite_fraction = 0.0;   // share of samples with F = +inf
  long n = 0;
  std::uint64_t seed = 0;
  bool exact_steps = false;         // knots at every sample value
};

/// Monte Carlo distribution function. An empty grid selects 64 log-spaced
/// nodes from the smallest positive sample to the cap (or the largest finite
/// sample). Atoms of the sample distribution are kept as jumps; values are
/// projected onto non-increasing sequences.
DistFn distribution_function(const Majorant& F, const Region& omega, long n, std::vector<double> s_grid,
                             std::uint64_t seed, int shards = 1);
/// The empirical distribution function itself: a right-continuous step at
/// every sampled value.
DistFn empirical_distribution(const Majorant& F, const Region& omega, long n, std::uint64_t seed);

/// t -> f(a^t) for t > 0.
DecreasingFn f1_transform(const DecreasingFn& f, double a);

/// Pool-adjacent-violators projection onto non-increasing sequences (equal weights).
std::vector<double> isotonic_nonincreasing(const std::vector<double>& y);

/// Integral of a tabulated function over [t, inf), exact for its piecewise-linear interpolant.
double integrate_tabulated(const DecreasingFn& f, double t);

struct LayerCake {
  double lhs = 0.0;        // integral of H over {H > t}
  double rhs = 0.0;        // int_t^inf h + t h(t)
  double residual = 0.0;
  double std_error = 0.0;  // combined standard error of lhs and rhs
};

/// Both sides of the layer-cake identity from independent sample streams.
LayerCake layer_cake_check(const Majorant& H, const Region& omega, double t, long n, std::uint64_t seed);

/// Samples of F over the region (independent stream from `seed`).
std::vector<double> sample_values(const Majorant& F, const Region& omega, long n, std::uint64_t seed, int shards = 1);

void write_distfn_csv(const DistFn& d, const std::string& path);

}  // namespace growthbound
