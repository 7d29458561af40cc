#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace band::lbfgs {

struct Options {
  int memory = 10;
  int max_iterations = 500;
  double grad_tol = 1e-6;     // two-norm of the gradient
  double f_dec = 1e-4;        // sufficient-decrease coefficient
  double step_shrink = 0.5;
  int max_linesearch = 60;
};

struct Result {
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;            // grad_tol reached
  bool line_search_failed = false;   // no acceptable step, iterate kept
  std::vector<double> f_history;     // accepted values; non-increasing
};

/** Objective: fills grad, returns f. May return +inf for forbidden states. */
using Objective =
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/**
 * Limited-memory quasi-Newton descent with backtracking line search.
 * Steps that produce non-finite values are rejected by backtracking, so
 * iterates never leave the admissible set. x is updated in place; the
 * accepted-value history decreases monotonically by construction.
 */
Result minimize(const Objective& objective, Eigen::VectorXd& x,
                const Options& options);

}  // namespace band::lbfgs
