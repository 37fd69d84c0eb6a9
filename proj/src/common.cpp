#include "growthbound/common.hpp"

#include <charconv>
#include <numbers>

namespace growthbound {

double unit_ball_volume(int k) {
  if (k < 1) throw ArgumentError("unit_ball_volume: dimension must be >= 1");
  return std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace growthbound
