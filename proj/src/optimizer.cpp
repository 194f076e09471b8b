#include "rlflow/optimizer.hpp"

#include <cmath>
#include <optional>

namespace rlflow {

namespace {

bool finite(const Evaluation& ev, int order) {
  if (!std::isfinite(ev.value)) return false;
  if (order >= 1 && !ev.gradient.allFinite()) return false;
  if (order >= 2 && !ev.hessian.allFinite()) return false;
  return true;
}

}  // namespace

OptimizerResult maximize(const ObjectiveFn& objective, Eigen::VectorXd start,
                         const OptimizerOptions& options) {
  OptimizerResult res;
  Eigen::VectorXd x = std::move(start);
  Evaluation ev = objective(x, 2);
  if (!finite(ev, 2)) {
    res.theta = x;
    res.at_optimum = ev;
    res.stop_reason = "non-finite objective at start";
    return res;
  }
  res.trace.push_back(ev.value);
  const Eigen::Index n = x.size();

  // Inverse-Hessian approximation of -objective, built from accepted steps.
  Eigen::MatrixXd inv_approx = Eigen::MatrixXd::Identity(n, n);
  bool have_secant = false;

  for (int iter = 0;; ++iter) {
    res.gradient_norm = ev.gradient.lpNorm<Eigen::Infinity>();
    if (res.gradient_norm < options.gradient_tolerance) {
      res.converged = true;
      res.stop_reason = "gradient tolerance";
      break;
    }
    if (iter >= options.max_iterations) {
      res.stop_reason = "iteration limit";
      break;
    }
    res.iterations = iter + 1;

    Eigen::VectorXd direction;
    Eigen::LLT<Eigen::MatrixXd> llt(-ev.hessian);
    if (llt.info() == Eigen::Success) {
      direction = llt.solve(ev.gradient);
      if (!direction.allFinite()) direction.resize(0);
    }
    if (direction.size() == 0) {
      ++res.quasi_newton_steps;
      if (!have_secant) inv_approx = Eigen::MatrixXd::Identity(n, n) / std::max(1.0, res.gradient_norm);
      direction = inv_approx * ev.gradient;
    }
    double slope = ev.gradient.dot(direction);
    if (!(slope > 0.0)) {
      direction = ev.gradient / std::max(1.0, res.gradient_norm);
      slope = ev.gradient.dot(direction);
    }
    const double dmax = direction.lpNorm<Eigen::Infinity>();
    if (dmax > options.max_step) {
      direction *= options.max_step / dmax;
      slope = ev.gradient.dot(direction);
    }

    double step = 1.0;
    std::optional<Eigen::VectorXd> accepted;
    double accepted_value = 0.0;
    for (int k = 0; k < 60; ++k, step *= 0.5) {
      Eigen::VectorXd trial = x + step * direction;
      double v = objective(trial, 0).value;
      if (std::isfinite(v) && v >= ev.value + 1e-4 * step * slope && v >= ev.value) {
        accepted = std::move(trial);
        accepted_value = v;
        break;
      }
    }
    if (!accepted) {
      // No representable increase along an ascent direction: the iterate sits
      // at the floating-point resolution of the objective.
      const double predicted = 0.5 * slope;
      res.converged = predicted <= 1e-9 * std::max(1.0, std::abs(ev.value));
      res.stop_reason = res.converged ? "precision floor" : "line search failed";
      break;
    }

    Evaluation next = objective(*accepted, 2);
    if (!finite(next, 2)) {
      res.stop_reason = "non-finite derivatives";
      break;
    }
    const Eigen::VectorXd s = *accepted - x;
    const Eigen::VectorXd yv = ev.gradient - next.gradient;  // change in gradient of -objective
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      if (!have_secant) inv_approx = Eigen::MatrixXd::Identity(n, n) * (sy / yv.squaredNorm());
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      inv_approx = (I - rho * s * yv.transpose()) * inv_approx * (I - rho * yv * s.transpose()) +
                   rho * s * s.transpose();
      have_secant = true;
    }

    const double change = std::abs(accepted_value - ev.value) / std::max(1.0, std::abs(ev.value));
    x = std::move(*accepted);
    ev = std::move(next);
    res.trace.push_back(ev.value);
    if (change < options.relative_change_tolerance) {
      res.gradient_norm = ev.gradient.lpNorm<Eigen::Infinity>();
      res.converged = true;
      res.stop_reason = "relative change tolerance";
      break;
    }
  }
  res.theta = x;
  res.at_optimum = std::move(ev);
  return res;
}

}  // namespace rlflow
