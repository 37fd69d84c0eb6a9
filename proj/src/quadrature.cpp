#include "growthbound/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "growthbound/common.hpp"

namespace growthbound::quad {

double finite(const Integrand& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  if (a > b) return -finite(f, b, a, rel_tol);
  static thread_local boost::math::quadrature::tanh_sinh<double> rule;
  double err = 0.0, l1 = 0.0;
  return rule.integrate(f, a, b, rel_tol, &err, &l1);
}

double adaptive(const Integrand& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, rel_tol, &err);
}

double tail(const Integrand& f, double a, double rel_tol) {
  constexpr int kMaxPanels = 60;
  const double w0 = std::max(1.0, std::abs(a));
  double left = a;
  double width = w0;
  double sum = 0.0;
  double prev = 0.0;
  double prev_ratio = -1.0;
  int zero_run = 0, stable_run = 0, flat_run = 0;
  for (int j = 0; j < kMaxPanels; ++j) {
    const double right = left + width;
    const double panel = adaptive(f, left, right, rel_tol * 0.1);
    sum += panel;
    if (std::abs(panel) <= 1e-16 * std::abs(sum) || panel == 0.0) {
      if (++zero_run >= 2) return sum;
    } else {
      zero_run = 0;
    }
    if (j >= 4 && prev != 0.0) {
      const double ratio = std::abs(panel / prev);
      if (ratio >= 0.999) {
        if (++flat_run >= 5) throw DivergentTail("tail integral does not decay beyond t = " + format_double(right));
      } else {
        flat_run = 0;
      }
      if (prev_ratio > 0.0 && std::abs(ratio - prev_ratio) < 1e-3 * prev_ratio && ratio < 0.999) {
        if (++stable_run >= 3) {
          const double rest = panel * ratio / (1.0 - ratio);
          if (std::abs(rest) <= rel_tol * std::abs(sum) || j >= 12) return sum + rest;
        }
      } else {
        stable_run = 0;
      }
      prev_ratio = ratio;
    }
    prev = panel;
    left = right;
    width *= 2.0;
  }
  throw DivergentTail("tail integral not converged after " + std::to_string(kMaxPanels) + " doubling panels");
}

}  // namespace growthbound::quad
