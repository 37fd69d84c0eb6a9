#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "growthbound/geometry.hpp"
#include "growthbound/measure.hpp"

namespace growthbound {

/// Uniform lattice over the bounding box of a region. Nodes outside the region
/// are ghosts holding the obstacle value; `Free` nodes also hold it but lie
/// inside (used for the exceptional set B).
class Grid {
 public:
  enum class Node : std::uint8_t { Interior, Ghost, Free };

  /// `nodes` points along the longest bounding-box axis, spacing shared by all axes.
  static Grid over(const Region& omega, int nodes);

  int dim() const { return k_; }
  double spacing() const { return h_; }
  const std::array<int, 3>& shape() const { return n_; }
  std::size_t size() const { return kind_.size(); }
  const Region& region() const { return omega_; }
  std::size_t index(int i, int j, int l = 0) const { return i + n_[0] * (j + static_cast<std::size_t>(n_[1]) * l); }
  std::array<int, 3> coords(std::size_t idx) const;
  Point node(std::size_t idx) const;
  Node kind(std::size_t idx) const { return kind_[idx]; }
  /// Full stencil inside the lattice.
  bool has_stencil(std::size_t idx) const;
  std::size_t stride(int axis) const { return axis == 0 ? 1 : axis == 1 ? n_[0] : static_cast<std::size_t>(n_[0]) * n_[1]; }
  /// Marks interior nodes within `radius` of the set as Free.
  void free_near(const SetDescr& set, double radius);
  std::size_t count(Node kind) const;
  /// Diameter of the bounding box.
  double diameter() const;

 private:
  Grid(Region omega) : omega_(std::move(omega)) {}
  Region omega_;
  int k_ = 2;
  double h_ = 0.0;
  std::array<int, 3> n_{1, 1, 1};
  Point origin_{};
  std::vector<Node> kind_;
};

enum class Schedule { RedBlack, Jacobi };

struct PerronOptions {
  double tol = 0.0;         // 0 selects 1e-8 * cap
  long max_iters = 1000000;
  Schedule schedule = Schedule::RedBlack;
  /// Over-relaxation for red-black sweeps; 1 keeps the iteration monotone.
  /// Values above 1 are followed by plain sweeps until the tolerance holds again.
  double relaxation = 1.0;
  /// Every 10th sweep the field is compared with the one 10 sweeps earlier
  /// (pointwise non-increase and residual non-increase); only for relaxation 1.
  bool audit_monotone = false;
};

/// omega_opt = 2 / (1 + sin(pi / n)) for n nodes along the longest axis.
double optimal_relaxation(const Grid& grid);

struct PerronResult {
  std::vector<double> M;
  std::vector<double> F;
  long iterations = 0;
  double residual = 0.0;
  double tol = 0.0;
  double cap = 0.0;
  double active_fraction = 0.0;
  bool converged = false;
  bool monotone = true;  // audit outcome
};

/// Largest u <= F with u(node) <= mean of its 2k neighbours at interior nodes,
/// by projected sweeps from u = F. Ghost and free nodes keep F. Non-convergence
/// is reported through `converged`, not thrown.
PerronResult largest_subharmonic_minorant(const Majorant& F, const Grid& grid, const PerronOptions& opts = {});
PerronResult largest_subharmonic_minorant(std::vector<double> F, const Grid& grid, const PerronOptions& opts = {});
/// F values at the grid nodes, capped; throws ArgumentError on +inf without a cap.
std::vector<double> obstacle_values(const Majorant& F, const Grid& grid);

struct SubharmonicReport {
  std::vector<std::size_t> violations;
  double max_excess = 0.0;
  long checked = 0;
  bool pass() const { return violations.empty(); }
};
/// Nodes inside the region with a full stencil where u exceeds the neighbour mean by more than tol.
SubharmonicReport discrete_subharmonic_check(const std::vector<double>& u, const Grid& grid, double tol = 1e-12,
                                             const std::function<bool(const Point&)>& exclude = nullptr);

struct MarginReport {
  std::vector<double> margins;  // bound - M per node; NaN where not compared
  double min_margin = kInfinity;
  Point witness{};
  long compared = 0;
  long violations = 0;
  Point worst_violation{};
  double c_disc = 1.0;
  std::string allowance_formula;
};

/// Margin bound(x) - M(x) at interior and free nodes where `where(x)` holds.
/// A violation is margin < -c_disc sqrt(h/diam) F(x).
MarginReport perron_vs_bound(const PerronResult& res, const Grid& grid, const std::function<double(const Point&)>& bound,
                             const std::function<bool(const Point&)>& where = nullptr, double c_disc = 1.0);

/// Rows i,j[,l],x,y[,z],M,F,active, after an optional stamp line.
void write_field_csv(const PerronResult& res, const Grid& grid, const std::string& path, const std::string& stamp = "");
/// F column of a field CSV written for the same grid.
std::vector<double> read_obstacle_csv(const Grid& grid, const std::string& path);

}  // namespace growthbound
