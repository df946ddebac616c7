#pragma once

#include <functional>

namespace qms {

struct QuadratureResult {
  double value;
  double error_estimate;
  int intervals;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// Throws ComputationError if the error target is not met within max_intervals.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-10,
                           int max_intervals = 2000);

}  // namespace qms
