#pragma once

#include <functional>

#include "pwshape/signed_log.hpp"

namespace pwshape {

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  /// Integral of |f| over the same range; the relative tolerance refers to it.
  double abs_integral = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod (7/15) on [a, b]. Stops when the estimated error is
/// below max(abs_tol, rel_tol * integral of |f|).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
                           double abs_tol = 0.0, int max_intervals = 2000);

struct LogQuadratureResult {
  SignedLogValue value;
  double rel_error = 0.0;  // estimated error relative to the integral of |f|
  int evaluations = 0;
  bool converged = false;
};

/// Integral over (0, inf) of a function given in sign/log form. `scale` is a
/// rough location of the bulk (e.g. the peak of the integrand); the range is
/// cut into dyadic pieces around it and each piece is integrated adaptively
/// after shifting by the largest log-magnitude seen on a scan.
LogQuadratureResult integrate_half_line(const std::function<SignedLogValue(double)>& log_f, double scale,
                                        double rel_tol = 1e-11);

}  // namespace pwshape
