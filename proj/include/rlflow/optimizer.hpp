#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rlflow/likelihood.hpp"

namespace rlflow {

struct OptimizerOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;       // max-norm
  double relative_change_tolerance = 1e-12;
  double max_step = 10.0;                 // max-norm cap on a trial step
};

struct OptimizerResult {
  Eigen::VectorXd theta;
  Evaluation at_optimum;  // value, gradient and Hessian at theta
  int iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
  std::string stop_reason;
  int quasi_newton_steps = 0;
  std::vector<double> trace;  // accepted log-likelihood values, starting point first
};

using ObjectiveFn = std::function<Evaluation(const Eigen::VectorXd&, int)>;

// Maximizes a smooth objective. Each iteration takes a Newton step when the
// Hessian is negative definite and a BFGS secant step otherwise, followed by
// a backtracking (Armijo) line search that only accepts increases.
OptimizerResult maximize(const ObjectiveFn& objective, Eigen::VectorXd start,
                         const OptimizerOptions& options = {});

inline OptimizerResult maximize(const LogLikelihood& ll, Eigen::VectorXd start,
                                const OptimizerOptions& options = {}) {
  return maximize([&ll](const Eigen::VectorXd& t, int order) { return ll.evaluate(t, order); },
                  std::move(start), options);
}

}  // namespace rlflow
