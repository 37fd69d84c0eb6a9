#pragma once

#include <functional>

namespace growthbound::quad {

using Integrand = std::function<double(double)>;

/// Double-exponential rule on a finite interval; tolerates integrable endpoint singularities.
double finite(const Integrand& f, double a, double b, double rel_tol = 1e-10);

/// Adaptive Gauss-Kronrod on a finite interval; for integrands with kinks.
double adaptive(const Integrand& f, double a, double b, double rel_tol = 1e-10);

/// Integral over [a, inf) by doubling panels with geometric tail extrapolation.
/// Throws DivergentTail when panel contributions stop shrinking.
double tail(const Integrand& f, double a, double rel_tol = 1e-10);

}  // namespace growthbound::quad
