#pragma once

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rlflow {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Per-observation log-likelihood written as a function of m linear indexes
// eta_b = x_b' theta_b (scalar parameters are indexes over a column of ones).
// `grad` receives d l / d eta (size m) and `hess` the m x m second
// derivatives in row-major order; either may be empty when not requested.
class ObservationKernel {
public:
  virtual ~ObservationKernel() = default;
  virtual int index_count() const = 0;
  virtual double evaluate(std::size_t row, std::span<const double> eta, std::span<double> grad,
                          std::span<double> hess) const = 0;
};

// Censored normal: indexes (x'beta, ln sigma). Rows with y <= limit are
// censored and contribute ln Phi((limit - x'beta)/sigma).
class TobitKernel final : public ObservationKernel {
public:
  TobitKernel(Eigen::VectorXd y, double left_limit) : y_(std::move(y)), limit_(left_limit) {}
  int index_count() const override { return 2; }
  double evaluate(std::size_t row, std::span<const double> eta, std::span<double> grad,
                  std::span<double> hess) const override;

private:
  Eigen::VectorXd y_;
  double limit_;
};

// NB2 with mean exp(x'beta) and variance mu + alpha mu^2: indexes (x'beta, ln alpha).
class NegBinKernel final : public ObservationKernel {
public:
  explicit NegBinKernel(Eigen::VectorXd y) : y_(std::move(y)) {}
  int index_count() const override { return 2; }
  double evaluate(std::size_t row, std::span<const double> eta, std::span<double> grad,
                  std::span<double> hess) const override;

private:
  Eigen::VectorXd y_;
};

// Logit structural-zero mixture over NB2: indexes (x_c'beta, x_z'gamma, ln alpha).
class ZinbKernel final : public ObservationKernel {
public:
  explicit ZinbKernel(Eigen::VectorXd y) : y_(std::move(y)) {}
  int index_count() const override { return 3; }
  double evaluate(std::size_t row, std::span<const double> eta, std::span<double> grad,
                  std::span<double> hess) const override;

private:
  Eigen::VectorXd y_;
};

struct Evaluation {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

// Sum of per-observation kernels over design blocks, one block per index.
// Parameters are the block coefficient vectors concatenated in block order.
// Rows are processed in fixed chunks reduced in chunk order, so results do
// not depend on the thread count.
class LogLikelihood {
public:
  LogLikelihood(std::vector<RowMatrix> blocks, std::shared_ptr<const ObservationKernel> kernel,
                int threads = 1);

  Eigen::Index dimension() const noexcept { return dim_; }
  Eigen::Index rows() const noexcept { return rows_; }
  const std::vector<RowMatrix>& blocks() const noexcept { return blocks_; }

  // order 0: value only; 1: + gradient; 2: + Hessian.
  Evaluation evaluate(const Eigen::VectorXd& theta, int order) const;
  double value(const Eigen::VectorXd& theta) const { return evaluate(theta, 0).value; }
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const { return evaluate(theta, 1).gradient; }
  Eigen::VectorXd pointwise(const Eigen::VectorXd& theta) const;

  static RowMatrix ones(Eigen::Index rows) { return RowMatrix::Ones(rows, 1); }

private:
  std::vector<RowMatrix> blocks_;
  std::vector<Eigen::Index> offsets_;
  std::shared_ptr<const ObservationKernel> kernel_;
  Eigen::Index dim_ = 0;
  Eigen::Index rows_ = 0;
  int threads_ = 1;
};

// Numerically careful ln Phi(x) and phi(x)/Phi(x).
double log_normal_cdf(double x);
double inverse_mills(double x);

}  // namespace rlflow
