#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace pwshape {

struct NelderMeadOptions {
  double f_tol = 1e-4;
  double x_tol = 1e-4;
  int max_iterations = 5000;
  /// One restart from a perturbed simplex when max_iterations is hit.
  bool restart = true;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  bool restarted = false;
  /// Best objective value after each iteration (iteration 0 is the initial simplex).
  std::vector<double> trace;
};

/// Derivative-free simplex minimization with the usual coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2). The initial
/// simplex perturbs each coordinate by 5% (0.00025 for zero entries).
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                             const NelderMeadOptions& opts = {});

}  // namespace pwshape
