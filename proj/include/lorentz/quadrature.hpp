#pragma once

#include <functional>

namespace lorentz {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

/// Globally adaptive Gauss-Kronrod 7-15 quadrature of f on [a, b]. Stops when
/// the summed error estimate falls below max(abs_tol, rel_tol * |value|).
QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                                double rel_tol = 1e-12, double abs_tol = 1e-14, int max_intervals = 4000);

}  // namespace lorentz
