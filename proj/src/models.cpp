#include "rlflow/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "rlflow/csv.hpp"
#include "rlflow/error.hpp"

namespace rlflow {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Ols: return "ols";
    case ModelKind::Tobit: return "tobit";
    case ModelKind::NegBin2: return "nb2";
    case ModelKind::Zinb: return "zinb";
  }
  return "unknown";
}

double normal_two_sided_p(double z) {
  if (!std::isfinite(z)) return std::isnan(z) ? std::nan("") : 0.0;
  return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

double chi2_upper_p(double statistic, double df) {
  if (!(statistic > 0.0)) return 1.0;
  return boost::math::gamma_q(df / 2.0, statistic / 2.0);
}

std::string significance_stars(double p) {
  if (!(p >= 0.0)) return "";
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.10) return "*";
  return "";
}

namespace {

std::vector<std::string> default_names(std::vector<std::string> names, Eigen::Index cols,
                                       const std::string& prefix) {
  if (names.empty())
    for (Eigen::Index c = 0; c < cols; ++c) names.push_back(prefix + std::to_string(c));
  if (static_cast<Eigen::Index>(names.size()) != cols)
    throw Error(ErrorCode::InvalidArgument, "name count does not match column count");
  return names;
}

void check_finite(const Eigen::VectorXd& y, const Eigen::MatrixXd& X) {
  if (y.size() != X.rows()) throw Error(ErrorCode::InvalidArgument, "y and X row counts differ");
  if (!y.allFinite() || !X.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite data");
  if (X.rows() < X.cols() + 1)
    throw Error(ErrorCode::InvalidArgument, "need more rows than columns");
}

Eigen::Index numeric_rank(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd scaled = X;
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    const double norm = X.col(c).norm();
    if (norm > 0.0) scaled.col(c) /= norm;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(1e-10);
  return qr.rank();
}

void check_rank(const Eigen::MatrixXd& X, const std::vector<std::string>& names) {
  if (numeric_rank(X) == X.cols()) return;
  for (Eigen::Index c = 1; c <= X.cols(); ++c)
    if (numeric_rank(X.leftCols(c)) < c) throw Error(ErrorCode::RankDeficient, names[static_cast<std::size_t>(c - 1)]);
  throw Error(ErrorCode::RankDeficient, "design");
}

void check_counts(const Eigen::VectorXd& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) < 0.0 || y(i) != std::floor(y(i)))
      throw Error(ErrorCode::NonIntegerResponse, "row " + std::to_string(i) + " value " + csv::format_double(y(i)));
}

// Canonical row order: lexicographic on (y, X rows...). Fits computed on the
// reordered data are identical for every permutation of the input rows.
std::vector<Eigen::Index> canonical_order(const Eigen::VectorXd& y,
                                          const std::vector<const Eigen::MatrixXd*>& designs) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(y.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (y(a) != y(b)) return y(a) < y(b);
    for (const auto* X : designs)
      for (Eigen::Index c = 0; c < X->cols(); ++c)
        if ((*X)(a, c) != (*X)(b, c)) return (*X)(a, c) < (*X)(b, c);
    return false;
  });
  return idx;
}

Eigen::VectorXd take(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& idx) {
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
  return out;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(X.rows(), X.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(idx[i]);
  return out;
}

// X_std = X * A, so x' beta = x_std' beta_std with beta = A beta_std.
struct Standardized {
  RowMatrix X;
  Eigen::MatrixXd A;
  std::optional<Eigen::Index> constant;
  double constant_value = 1.0;
};

Standardized standardize(const Eigen::MatrixXd& X) {
  Standardized s;
  const Eigen::Index p = X.cols();
  const auto n = static_cast<double>(X.rows());
  for (Eigen::Index c = 0; c < p; ++c) {
    const double v = X(0, c);
    if (v != 0.0 && (X.col(c).array() == v).all()) {
      s.constant = c;
      s.constant_value = v;
      break;
    }
  }
  s.A = Eigen::MatrixXd::Identity(p, p);
  for (Eigen::Index c = 0; c < p; ++c) {
    if (s.constant && c == *s.constant) continue;
    const double mean = s.constant ? X.col(c).mean() : 0.0;
    const double sd = std::sqrt((X.col(c).array() - mean).square().sum() / n);
    const double scale = sd > 0.0 ? sd : 1.0;
    s.A(c, c) = 1.0 / scale;
    if (s.constant) s.A(*s.constant, c) = -mean / (s.constant_value * scale);
  }
  s.X = X * s.A;
  return s;
}

Eigen::MatrixXd covariance_from(const Eigen::MatrixXd& hessian) {
  Eigen::MatrixXd info = -hessian;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(info.rows(), info.cols()));
    if (cov.allFinite()) return cov;
  }
  return Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(info).pseudoInverse();
}

Eigen::VectorXd std_errors(const Eigen::MatrixXd& cov) {
  return cov.diagonal().array().max(0.0).sqrt();
}

OptimizerResult run(const LogLikelihood& ll, Eigen::VectorXd start, const FitOptions& options) {
  auto res = maximize(ll, std::move(start), options.optimizer);
  if (!res.converged && options.require_convergence)
    throw ConvergenceError(res.iterations, res.gradient_norm);
  return res;
}

void copy_convergence(ModelFit& fit, const OptimizerResult& res) {
  fit.converged = res.converged;
  fit.iterations = res.iterations;
  fit.gradient_norm = res.gradient_norm;
  fit.stop_reason = res.stop_reason;
  fit.trace = res.trace;
}

void finish_lr(ModelFit& fit, bool has_constant, Eigen::Index tested_columns) {
  fit.lr_chi2 = 2.0 * (fit.loglik - fit.loglik_null);
  fit.lr_df = static_cast<int>(has_constant ? tested_columns - 1 : tested_columns);
  fit.lr_p = fit.lr_df > 0 ? chi2_upper_p(fit.lr_chi2, fit.lr_df) : 1.0;
  fit.pseudo_r2 = fit.loglik_null < 0.0 ? 1.0 - fit.loglik / fit.loglik_null : std::nan("");
}

Eigen::VectorXd least_squares(const RowMatrix& X, const Eigen::VectorXd& y) {
  return Eigen::MatrixXd(X).colPivHouseholderQr().solve(y);
}

// Tobit on already standardized, canonically ordered data.
OptimizerResult tobit_core(const RowMatrix& Z, const Eigen::VectorXd& y, double limit,
                           const FitOptions& options) {
  Eigen::VectorXd b0 = least_squares(Z, y);
  Eigen::VectorXd resid = y - Eigen::MatrixXd(Z) * b0;
  double s0 = std::sqrt(resid.squaredNorm() / static_cast<double>(y.size()));
  if (!(s0 > 0.0)) s0 = 1e-3 * std::max(1.0, y.cwiseAbs().maxCoeff());
  Eigen::VectorXd start(Z.cols() + 1);
  start << b0, std::log(s0);
  LogLikelihood ll({Z, LogLikelihood::ones(Z.rows())}, std::make_shared<TobitKernel>(y, limit),
                   options.threads);
  return run(ll, std::move(start), options);
}

OptimizerResult nb_core(const RowMatrix& Z, const Eigen::VectorXd& y,
                        const std::optional<Eigen::Index>& constant, double constant_value,
                        const FitOptions& options) {
  Eigen::VectorXd start = Eigen::VectorXd::Zero(Z.cols() + 1);
  if (constant) start(*constant) = std::log(y.mean()) / constant_value;
  LogLikelihood ll({Z, LogLikelihood::ones(Z.rows())}, std::make_shared<NegBinKernel>(y), options.threads);
  return run(ll, std::move(start), options);
}

}  // namespace

std::vector<CoefficientRow> ModelFit::coefficient_table() const {
  std::vector<CoefficientRow> rows;
  auto add = [&](const std::string& eq, const std::string& name, double est, double se) {
    double z = se > 0.0 ? est / se : std::nan("");
    rows.push_back({eq, name, est, se, z, normal_two_sided_p(z)});
  };
  for (std::size_t k = 0; k < names.size(); ++k)
    add("main", names[k], beta(static_cast<Eigen::Index>(k)), beta_se(static_cast<Eigen::Index>(k)));
  for (std::size_t k = 0; k < inflate_names.size(); ++k)
    add("inflate", inflate_names[k], gamma(static_cast<Eigen::Index>(k)), gamma_se(static_cast<Eigen::Index>(k)));
  if (kind == ModelKind::Tobit || kind == ModelKind::Ols) add("aux", "sigma", sigma, sigma_se);
  if (kind == ModelKind::NegBin2 || kind == ModelKind::Zinb) {
    add("aux", "lnalpha", ln_alpha, ln_alpha_se);
    add("aux", "alpha", alpha, alpha * ln_alpha_se);
  }
  return rows;
}

int ModelFit::free_parameters() const {
  return static_cast<int>(names.size() + inflate_names.size()) + 1;
}

ModelFit fit_ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, std::vector<std::string> names) {
  check_finite(y, X);
  names = default_names(std::move(names), X.cols(), "x");
  check_rank(X, names);
  auto order = canonical_order(y, {&X});
  const Eigen::VectorXd ys = take(y, order);
  const Eigen::MatrixXd Xs = take_rows(X, order);

  ModelFit fit;
  fit.kind = ModelKind::Ols;
  fit.names = names;
  fit.n = static_cast<std::size_t>(y.size());
  const auto n = static_cast<double>(y.size());
  const auto p = static_cast<double>(X.cols());
  auto qr = Xs.colPivHouseholderQr();
  fit.beta = qr.solve(ys);
  const Eigen::VectorXd resid = ys - Xs * fit.beta;
  fit.rss = resid.squaredNorm();
  const double s2 = fit.rss / (n - p);
  fit.sigma = std::sqrt(s2);
  fit.sigma_se = fit.sigma / std::sqrt(2.0 * (n - p));
  Eigen::MatrixXd xtx_inv = (Xs.transpose() * Xs).ldlt().solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
  fit.covariance = s2 * xtx_inv;
  fit.beta_se = std_errors(fit.covariance);

  const double tss = (ys.array() - ys.mean()).square().sum();
  fit.r_squared = tss > 0.0 ? 1.0 - fit.rss / tss : std::nan("");
  auto gaussian_ll = [n](double rss) {
    return -0.5 * n * (std::log(2.0 * std::numbers::pi * rss / n) + 1.0);
  };
  fit.loglik = gaussian_ll(fit.rss);
  fit.loglik_null = gaussian_ll(tss);
  auto st = standardize(X);
  finish_lr(fit, st.constant.has_value(), X.cols());
  fit.iterations = 0;
  fit.stop_reason = "closed form";
  return fit;
}

ModelFit fit_tobit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, std::vector<std::string> names,
                   double left_limit, const FitOptions& options) {
  check_finite(y, X);
  names = default_names(std::move(names), X.cols(), "x");
  check_rank(X, names);
  const auto n_censored = static_cast<std::size_t>((y.array() <= left_limit).count());
  if (n_censored == static_cast<std::size_t>(y.size()))
    throw Error(ErrorCode::AllCensored, "every observation is at the censoring limit");

  auto order = canonical_order(y, {&X});
  const Eigen::VectorXd ys = take(y, order);
  const Eigen::MatrixXd Xs = take_rows(X, order);
  auto st = standardize(Xs);
  auto res = tobit_core(st.X, ys, left_limit, options);

  ModelFit fit;
  fit.kind = ModelKind::Tobit;
  fit.names = names;
  fit.left_limit = left_limit;
  fit.n = static_cast<std::size_t>(y.size());
  fit.n_censored = n_censored;
  fit.n_uncensored = fit.n - n_censored;
  copy_convergence(fit, res);
  fit.loglik = res.at_optimum.value;

  const Eigen::Index p = X.cols();
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(p + 1, p + 1);
  J.topLeftCorner(p, p) = st.A;
  fit.covariance = J * covariance_from(res.at_optimum.hessian) * J.transpose();
  Eigen::VectorXd se = std_errors(fit.covariance);
  fit.beta = st.A * res.theta.head(p);
  fit.beta_se = se.head(p);
  fit.sigma = std::exp(res.theta(p));
  fit.sigma_se = fit.sigma * se(p);

  // Intercept-plus-sigma null model.
  RowMatrix ones = LogLikelihood::ones(Xs.rows());
  FitOptions null_options = options;
  null_options.require_convergence = false;
  auto null_res = tobit_core(ones, ys, left_limit, null_options);
  fit.loglik_null = null_res.at_optimum.value;
  finish_lr(fit, st.constant.has_value(), p);
  return fit;
}

ModelFit fit_nb2(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, std::vector<std::string> names,
                 const FitOptions& options) {
  check_finite(y, X);
  check_counts(y);
  names = default_names(std::move(names), X.cols(), "x");
  check_rank(X, names);
  if (!(y.sum() > 0.0)) throw Error(ErrorCode::InvalidArgument, "all responses are zero");

  auto order = canonical_order(y, {&X});
  const Eigen::VectorXd ys = take(y, order);
  const Eigen::MatrixXd Xs = take_rows(X, order);
  auto st = standardize(Xs);
  auto res = nb_core(st.X, ys, st.constant, st.constant_value, options);

  ModelFit fit;
  fit.kind = ModelKind::NegBin2;
  fit.names = names;
  fit.n = static_cast<std::size_t>(y.size());
  fit.n_zero = static_cast<std::size_t>((y.array() == 0.0).count());
  copy_convergence(fit, res);
  fit.loglik = res.at_optimum.value;

  const Eigen::Index p = X.cols();
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(p + 1, p + 1);
  J.topLeftCorner(p, p) = st.A;
  fit.covariance = J * covariance_from(res.at_optimum.hessian) * J.transpose();
  Eigen::VectorXd se = std_errors(fit.covariance);
  fit.beta = st.A * res.theta.head(p);
  fit.beta_se = se.head(p);
  fit.ln_alpha = res.theta(p);
  fit.ln_alpha_se = se(p);
  fit.alpha = std::exp(fit.ln_alpha);

  FitOptions null_options = options;
  null_options.require_convergence = false;
  auto null_res = nb_core(LogLikelihood::ones(Xs.rows()), ys, Eigen::Index{0}, 1.0, null_options);
  fit.loglik_null = null_res.at_optimum.value;
  finish_lr(fit, st.constant.has_value(), p);
  return fit;
}

ModelFit fit_zinb(const Eigen::VectorXd& y, const Eigen::MatrixXd& X_count,
                  const Eigen::MatrixXd& X_inflate, std::vector<std::string> count_names,
                  std::vector<std::string> inflate_names, const FitOptions& options) {
  check_finite(y, X_count);
  check_finite(y, X_inflate);
  check_counts(y);
  count_names = default_names(std::move(count_names), X_count.cols(), "x");
  inflate_names = default_names(std::move(inflate_names), X_inflate.cols(), "z");
  check_rank(X_count, count_names);
  check_rank(X_inflate, inflate_names);
  const auto n_zero = static_cast<std::size_t>((y.array() == 0.0).count());
  if (n_zero == 0) throw Error(ErrorCode::NoZeros, "inflation equation is not identified");
  if (!(y.sum() > 0.0)) throw Error(ErrorCode::InvalidArgument, "all responses are zero");

  auto order = canonical_order(y, {&X_count, &X_inflate});
  const Eigen::VectorXd ys = take(y, order);
  const Eigen::MatrixXd Xc = take_rows(X_count, order);
  const Eigen::MatrixXd Xz = take_rows(X_inflate, order);
  auto sc = standardize(Xc);
  auto sz = standardize(Xz);
  const Eigen::Index pc = Xc.cols(), pz = Xz.cols();

  FitOptions start_options = options;
  start_options.require_convergence = false;
  auto nb = nb_core(sc.X, ys, sc.constant, sc.constant_value, start_options);

  // Inflation intercept from the zeros the NB fit leaves unexplained.
  Eigen::VectorXd gamma0 = Eigen::VectorXd::Zero(pz);
  if (sz.constant) {
    Eigen::VectorXd mu = (Eigen::MatrixXd(sc.X) * nb.theta.head(pc)).array().exp();
    const double alpha = std::exp(nb.theta(pc));
    double nb_zero = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) nb_zero += std::exp(-std::log1p(alpha * mu(i)) / alpha);
    nb_zero /= static_cast<double>(mu.size());
    const double observed = static_cast<double>(n_zero) / static_cast<double>(ys.size());
    double excess = nb_zero < 1.0 ? (observed - nb_zero) / (1.0 - nb_zero) : 0.0;
    excess = std::clamp(excess, 0.02, 0.9);
    gamma0(*sz.constant) = std::log(excess / (1.0 - excess)) / sz.constant_value;
  }

  auto kernel = std::make_shared<ZinbKernel>(ys);
  Eigen::VectorXd start(pc + pz + 1);
  start << nb.theta.head(pc), gamma0, nb.theta(pc);
  LogLikelihood ll({sc.X, sz.X, LogLikelihood::ones(ys.size())}, kernel, options.threads);
  auto res = run(ll, start, options);

  ModelFit fit;
  fit.kind = ModelKind::Zinb;
  fit.names = count_names;
  fit.inflate_names = inflate_names;
  fit.n = static_cast<std::size_t>(y.size());
  fit.n_zero = n_zero;
  copy_convergence(fit, res);
  fit.loglik = res.at_optimum.value;

  const Eigen::Index dim = pc + pz + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(dim, dim);
  J.topLeftCorner(pc, pc) = sc.A;
  J.block(pc, pc, pz, pz) = sz.A;
  fit.covariance = J * covariance_from(res.at_optimum.hessian) * J.transpose();
  Eigen::VectorXd se = std_errors(fit.covariance);
  fit.beta = sc.A * res.theta.head(pc);
  fit.beta_se = se.head(pc);
  fit.gamma = sz.A * res.theta.segment(pc, pz);
  fit.gamma_se = se.segment(pc, pz);
  fit.ln_alpha = res.theta(dim - 1);
  fit.ln_alpha_se = se(dim - 1);
  fit.alpha = std::exp(fit.ln_alpha);

  // Null: constant-only count equation, full inflation equation.
  RowMatrix ones = LogLikelihood::ones(ys.size());
  LogLikelihood null_ll({ones, sz.X, ones}, kernel, options.threads);
  Eigen::VectorXd null_start(pz + 2);
  null_start << std::log(ys.mean()), res.theta.segment(pc, pz), res.theta(dim - 1);
  FitOptions null_options = options;
  null_options.require_convergence = false;
  auto null_res = maximize(null_ll, null_start, null_options.optimizer);
  fit.loglik_null = null_res.at_optimum.value;
  finish_lr(fit, sc.constant.has_value(), pc);
  return fit;
}

Eigen::VectorXd pointwise_loglik(const ModelFit& fit, const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                 const Eigen::MatrixXd& X_inflate) {
  if (X.cols() != fit.beta.size()) throw Error(ErrorCode::RegressorMismatch, "count design width");
  const RowMatrix ones = LogLikelihood::ones(X.rows());
  switch (fit.kind) {
    case ModelKind::Ols:
    case ModelKind::Tobit: {
      double limit = fit.kind == ModelKind::Tobit ? fit.left_limit : -std::numeric_limits<double>::infinity();
      double sigma = fit.kind == ModelKind::Tobit ? fit.sigma : std::sqrt(fit.rss / static_cast<double>(fit.n));
      Eigen::VectorXd theta(fit.beta.size() + 1);
      theta << fit.beta, std::log(sigma);
      LogLikelihood ll({RowMatrix(X), ones}, std::make_shared<TobitKernel>(y, limit));
      return ll.pointwise(theta);
    }
    case ModelKind::NegBin2: {
      Eigen::VectorXd theta(fit.beta.size() + 1);
      theta << fit.beta, fit.ln_alpha;
      LogLikelihood ll({RowMatrix(X), ones}, std::make_shared<NegBinKernel>(y));
      return ll.pointwise(theta);
    }
    case ModelKind::Zinb: {
      if (X_inflate.cols() != fit.gamma.size() || X_inflate.rows() != X.rows())
        throw Error(ErrorCode::RegressorMismatch, "inflation design width");
      Eigen::VectorXd theta(fit.beta.size() + fit.gamma.size() + 1);
      theta << fit.beta, fit.gamma, fit.ln_alpha;
      LogLikelihood ll({RowMatrix(X), RowMatrix(X_inflate), ones}, std::make_shared<ZinbKernel>(y));
      return ll.pointwise(theta);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model kind");
}

TestResult vuong_test(const ModelFit& zinb, const ModelFit& nb, const Eigen::VectorXd& y,
                      const Eigen::MatrixXd& X_count, const Eigen::MatrixXd& X_inflate) {
  if (zinb.kind != ModelKind::Zinb || nb.kind != ModelKind::NegBin2)
    throw Error(ErrorCode::FamilyMismatch, "vuong_test expects (zinb, nb2)");
  if (zinb.n != nb.n || zinb.n != static_cast<std::size_t>(y.size()))
    throw Error(ErrorCode::MismatchedObservations, "fits were estimated on different samples");
  Eigen::VectorXd m = pointwise_loglik(zinb, y, X_count, X_inflate) - pointwise_loglik(nb, y, X_count);
  const auto n = static_cast<double>(m.size());
  const double mean = m.mean();
  const double sd = std::sqrt((m.array() - mean).square().sum() / (n - 1.0));
  TestResult t;
  t.name = "vuong";
  t.df = 1;
  if (!(sd > 0.0)) {
    t.undefined_reason = "sd=0";
    t.p_value = std::nan("");
    return t;
  }
  t.statistic = mean * std::sqrt(n) / sd;
  t.p_value = 0.5 * std::erfc(*t.statistic / std::numbers::sqrt2);
  return t;
}

TestResult chow_test(const ModelFit& pooled, const ModelFit& a, const ModelFit& b) {
  if (pooled.kind != a.kind || pooled.kind != b.kind)
    throw Error(ErrorCode::FamilyMismatch, "chow_test needs one model family");
  if (pooled.names != a.names || pooled.names != b.names || pooled.inflate_names != a.inflate_names ||
      pooled.inflate_names != b.inflate_names)
    throw Error(ErrorCode::RegressorMismatch, "chow_test needs identical regressors");
  if (a.n + b.n != pooled.n)
    throw Error(ErrorCode::MismatchedObservations, "sub-samples do not partition the pooled sample");
  TestResult t;
  t.name = "chow";
  t.df = a.free_parameters();
  // Sub-fits nest the pooled fit, so only optimizer slack can push this below 0.
  t.statistic = std::max(0.0, 2.0 * (a.loglik + b.loglik - pooled.loglik));
  t.p_value = chi2_upper_p(*t.statistic, t.df);
  return t;
}

TestResult lr_test(const ModelFit& restricted, const ModelFit& unrestricted, int df) {
  if (df < 1) throw Error(ErrorCode::InvalidArgument, "df must be >= 1");
  TestResult t;
  t.name = "lr";
  t.df = df;
  t.statistic = std::max(0.0, 2.0 * (unrestricted.loglik - restricted.loglik));
  t.p_value = chi2_upper_p(*t.statistic, df);
  return t;
}

void write_fit_report(std::ostream& out, const ModelFit& fit) {
  csv::write_row(out, {"coef", "estimate", "std_err", "z", "p", "stars"});
  for (const auto& r : fit.coefficient_table()) {
    std::string name = r.equation == "main" ? r.name : r.equation + ":" + r.name;
    csv::write_row(out, {name, csv::format_double(r.estimate), csv::format_double(r.std_err),
                         csv::format_double(r.z), csv::format_double(r.p), significance_stars(r.p)});
  }
  out << '\n';
  auto kv = [&](const std::string& k, const std::string& v) { csv::write_row(out, {k, v}); };
  kv("model", to_string(fit.kind));
  kv("loglik", csv::format_double(fit.loglik));
  kv("loglik_null", csv::format_double(fit.loglik_null));
  kv("lr_chi2", csv::format_double(fit.lr_chi2));
  kv("lr_df", std::to_string(fit.lr_df));
  kv("lr_p", csv::format_double(fit.lr_p));
  kv("pseudo_r2", csv::format_double(fit.pseudo_r2));
  kv("n", std::to_string(fit.n));
  if (fit.kind == ModelKind::Tobit) {
    kv("n_censored", std::to_string(fit.n_censored));
    kv("n_uncensored", std::to_string(fit.n_uncensored));
  }
  if (fit.kind == ModelKind::NegBin2 || fit.kind == ModelKind::Zinb) kv("n_zero", std::to_string(fit.n_zero));
  if (fit.kind == ModelKind::Tobit || fit.kind == ModelKind::Ols) kv("sigma", csv::format_double(fit.sigma));
  if (fit.kind == ModelKind::NegBin2 || fit.kind == ModelKind::Zinb) {
    kv("ln_alpha", csv::format_double(fit.ln_alpha));
    kv("alpha", csv::format_double(fit.alpha));
  }
  kv("converged", fit.converged ? "true" : "false");
  kv("iterations", std::to_string(fit.iterations));
}

}  // namespace rlflow
