#include "growthbound/rng.hpp"

#include <numbers>

namespace growthbound {

double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Point uniform_in_ball(Rng& rng, const Point& c, double r, int k) {
  Point d{};
  double n2 = 0.0;
  while (n2 == 0.0) {
    for (int i = 0; i < k; ++i) {
      d[i] = standard_normal(rng);
      n2 += d[i] * d[i];
    }
  }
  const double rad = r * std::pow(uniform01(rng), 1.0 / k) / std::sqrt(n2);
  Point p = c;
  for (int i = 0; i < k; ++i) p[i] += rad * d[i];
  return p;
}

}  // namespace growthbound
