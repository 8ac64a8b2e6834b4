#pragma once

#include <Eigen/Dense>
#include <functional>

namespace triring {

struct SimplexOptions {
  int max_iterations = 2000;
  double x_tolerance = 1e-9;   // simplex diameter
  double f_tolerance = 1e-12;  // value spread across vertices
  double initial_step = 0.05;  // per-coordinate displacement of the start simplex
};

struct SimplexResult {
  Eigen::VectorXd x;
  double f_min = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

// Nelder-Mead derivative-free minimizer with the dimension-adaptive
// coefficients of Gao & Han. Deterministic for a fixed starting point.
SimplexResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& x0, const SimplexOptions& options = {});

}  // namespace triring
