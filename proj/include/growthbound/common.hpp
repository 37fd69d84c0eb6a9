#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace growthbound {

/// Extended-real infinity. Never produced by overflow; set explicitly.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Points live in R^3; lower-dimensional work leaves trailing coordinates at 0.
inline constexpr int kMaxDim = 3;
using Point = std::array<double, kMaxDim>;

inline double norm(const Point& p) { return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]); }

inline double distance(const Point& a, const Point& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

/// Volume of the unit ball in R^k.
double unit_ball_volume(int k);

/// Base class of all library errors; `kind()` is a stable machine-readable tag.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what) : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define GROWTHBOUND_ERROR(Name)                                                \
  class Name : public Error {                                                  \
   public:                                                                     \
    explicit Name(const std::string& what) : Error(#Name, what) {}             \
  }

GROWTHBOUND_ERROR(DomainError);
GROWTHBOUND_ERROR(ArgumentError);
GROWTHBOUND_ERROR(OutsideRegion);
GROWTHBOUND_ERROR(DivergentTail);
GROWTHBOUND_ERROR(DivergentIntegral);
GROWTHBOUND_ERROR(InvalidProfile);
GROWTHBOUND_ERROR(ChartError);
GROWTHBOUND_ERROR(ChartViolation);
GROWTHBOUND_ERROR(UpgradeUnavailable);
GROWTHBOUND_ERROR(LimitDiverges);
GROWTHBOUND_ERROR(CalibrationFailed);
GROWTHBOUND_ERROR(BarrierViolation);
GROWTHBOUND_ERROR(InsufficientScales);
GROWTHBOUND_ERROR(ConfigError);

#undef GROWTHBOUND_ERROR

/// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);

}  // namespace growthbound
