#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rlflow/optimizer.hpp"

namespace rlflow {

enum class ModelKind { Ols, Tobit, NegBin2, Zinb };

std::string to_string(ModelKind kind);

struct FitOptions {
  OptimizerOptions optimizer;
  int threads = 1;
  // Throw NonConvergence instead of returning a fit flagged unconverged.
  bool require_convergence = true;
};

struct CoefficientRow {
  std::string equation;  // "main", "inflate" or "aux"
  std::string name;
  double estimate = 0.0;
  double std_err = 0.0;
  double z = 0.0;
  double p = 0.0;
};

struct ModelFit {
  ModelKind kind = ModelKind::Ols;
  std::vector<std::string> names;          // main (count) equation
  Eigen::VectorXd beta, beta_se;
  std::vector<std::string> inflate_names;  // ZINB only
  Eigen::VectorXd gamma, gamma_se;

  double sigma = 0.0, sigma_se = 0.0;          // OLS / Tobit
  double ln_alpha = 0.0, ln_alpha_se = 0.0;    // NB2 / ZINB
  double alpha = 0.0;
  double left_limit = 0.0;                     // Tobit

  double loglik = 0.0;
  double loglik_null = 0.0;
  double lr_chi2 = 0.0;
  int lr_df = 0;
  double lr_p = 1.0;
  double pseudo_r2 = 0.0;
  double r_squared = 0.0;    // OLS only
  double rss = 0.0;          // OLS only

  std::size_t n = 0;
  std::size_t n_censored = 0, n_uncensored = 0;  // Tobit
  std::size_t n_zero = 0;                        // NB2 / ZINB

  bool converged = true;
  int iterations = 0;
  double gradient_norm = 0.0;
  std::string stop_reason;
  std::vector<double> trace;

  // Covariance of all reported parameters in order
  // (beta, gamma, ln sigma | ln alpha).
  Eigen::MatrixXd covariance;

  std::vector<CoefficientRow> coefficient_table() const;
  // Coefficients plus the scale/dispersion parameter.
  int free_parameters() const;
};

// Classical least squares. Throws RankDeficient naming the first dependent column.
ModelFit fit_ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                 std::vector<std::string> names = {});

ModelFit fit_tobit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                   std::vector<std::string> names = {}, double left_limit = 0.0,
                   const FitOptions& options = {});

ModelFit fit_nb2(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                 std::vector<std::string> names = {}, const FitOptions& options = {});

ModelFit fit_zinb(const Eigen::VectorXd& y, const Eigen::MatrixXd& X_count,
                  const Eigen::MatrixXd& X_inflate, std::vector<std::string> count_names = {},
                  std::vector<std::string> inflate_names = {}, const FitOptions& options = {});

// Per-observation log-likelihood of a fitted model on (y, X[, X_inflate]).
Eigen::VectorXd pointwise_loglik(const ModelFit& fit, const Eigen::VectorXd& y,
                                 const Eigen::MatrixXd& X,
                                 const Eigen::MatrixXd& X_inflate = Eigen::MatrixXd());

struct TestResult {
  std::string name;
  std::optional<double> statistic;  // empty when the statistic is undefined
  int df = 1;
  double p_value = 1.0;
  std::string undefined_reason;

  bool defined() const noexcept { return statistic.has_value(); }
};

// Uncorrected Vuong statistic of ZINB vs NB2; p-value is the upper tail.
TestResult vuong_test(const ModelFit& zinb, const ModelFit& nb, const Eigen::VectorXd& y,
                      const Eigen::MatrixXd& X_count, const Eigen::MatrixXd& X_inflate);

// Likelihood-ratio structural-break test: 2 (LL_a + LL_b - LL_pooled) on the
// free-parameter count of one sub-model.
TestResult chow_test(const ModelFit& pooled, const ModelFit& a, const ModelFit& b);

// 2 (LL_unrestricted - LL_restricted) against chi-square with `df`.
TestResult lr_test(const ModelFit& restricted, const ModelFit& unrestricted, int df);

double normal_two_sided_p(double z);
double chi2_upper_p(double statistic, double df);
// "***" p < 0.01, "**" p < 0.05, "*" p < 0.10.
std::string significance_stars(double p);

void write_fit_report(std::ostream& out, const ModelFit& fit);

}  // namespace rlflow
