#include <cmath>
#include <optional>
#include <sstream>

#include "doctest.h"

#include "rlflow/error.hpp"
#include "rlflow/likelihood.hpp"
#include "rlflow/models.hpp"
#include "rlflow/random.hpp"

using namespace rlflow;

namespace {

Eigen::MatrixXd design(Rng& rng, Eigen::Index n, Eigen::Index k) {
  Eigen::MatrixXd X(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < k; ++j) X(i, j) = rng.normal();
  }
  return X;
}

std::optional<ErrorCode> code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("OLS matches the normal equations") {
  Rng rng(1);
  auto X = design(rng, 200, 3);
  Eigen::VectorXd beta(3);
  beta << 2.0, -1.0, 0.5;
  Eigen::VectorXd y = X * beta;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += 0.1 * rng.normal();
  auto fit = fit_ols(y, X);
  const Eigen::VectorXd ne = (X.transpose() * X).ldlt().solve(X.transpose() * y);
  CHECK((fit.beta - ne).norm() < 1e-10);
  CHECK(fit.names == std::vector<std::string>{"x0", "x1", "x2"});
  CHECK(fit.r_squared > 0.99);
  CHECK(fit.stop_reason == "closed form");

  Eigen::MatrixXd dup(200, 3);
  dup << X.col(0), X.col(1), 2.0 * X.col(1);
  try {
    fit_ols(y, dup, {"const", "a", "b"});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
    CHECK(std::string(e.what()).find("b") != std::string::npos);
  }
}

TEST_CASE("Tobit without censoring reproduces OLS") {
  Rng rng(2);
  auto X = design(rng, 500, 3);
  Eigen::VectorXd y = 50.0 + (X.col(1) - X.col(2)).array();
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += rng.normal();
  auto ols = fit_ols(y, X);
  auto tob = fit_tobit(y, X);
  CHECK(tob.n_censored == 0);
  for (Eigen::Index k = 0; k < 3; ++k) CHECK(tob.beta(k) == doctest::Approx(ols.beta(k)).epsilon(1e-6));
  CHECK(tob.sigma == doctest::Approx(std::sqrt(ols.rss / 500.0)).epsilon(1e-6));

  Eigen::VectorXd zeros = Eigen::VectorXd::Zero(500);
  CHECK(code_of([&] { fit_tobit(zeros, X); }) == ErrorCode::AllCensored);
}

TEST_CASE("Tobit is invariant to row order and equivariant to response scale") {
  Rng rng(3);
  auto X = design(rng, 800, 3);
  Eigen::VectorXd y(800);
  for (Eigen::Index i = 0; i < 800; ++i) y(i) = std::max(0.0, 0.3 + X(i, 1) - 0.5 * X(i, 2) + rng.normal());
  auto base = fit_tobit(y, X);
  CHECK(base.n_censored > 100);

  Eigen::VectorXi perm(800);
  for (int i = 0; i < 800; ++i) perm(i) = (i * 7 + 3) % 800;
  Eigen::MatrixXd Xp(800, 3);
  Eigen::VectorXd yp(800);
  for (int i = 0; i < 800; ++i) {
    Xp.row(i) = X.row(perm(i));
    yp(i) = y(perm(i));
  }
  auto shuffled = fit_tobit(yp, Xp);
  CHECK(shuffled.beta == base.beta);
  CHECK(shuffled.loglik == base.loglik);

  auto scaled = fit_tobit(10.0 * y, X);
  for (Eigen::Index k = 0; k < 3; ++k) CHECK(scaled.beta(k) == doctest::Approx(10.0 * base.beta(k)).epsilon(1e-6));
  CHECK(scaled.sigma == doctest::Approx(10.0 * base.sigma).epsilon(1e-6));
}

TEST_CASE("NB2 on Poisson data shrinks the dispersion") {
  Rng rng(4);
  auto X = design(rng, 5000, 2);
  Eigen::VectorXd y(5000);
  for (Eigen::Index i = 0; i < 5000; ++i) y(i) = static_cast<double>(rng.poisson(std::exp(0.5 + 0.4 * X(i, 1))));
  auto fit = fit_nb2(y, X);
  CHECK(fit.alpha < 0.05);
  CHECK(fit.beta(1) == doctest::Approx(0.4).epsilon(0.1));
  CHECK(fit.lr_df == 1);
  CHECK(fit.lr_chi2 > 0.0);

  Eigen::VectorXd frac = y;
  frac(0) = 0.5;
  CHECK(code_of([&] { fit_nb2(frac, X); }) == ErrorCode::NonIntegerResponse);
  Eigen::VectorXd neg = y;
  neg(0) = -1.0;
  CHECK(code_of([&] { fit_nb2(neg, X); }) == ErrorCode::NonIntegerResponse);
}

TEST_CASE("ZINB nests NB2 and needs zeros") {
  Rng rng(5);
  auto X = design(rng, 3000, 2);
  Eigen::VectorXd y(3000);
  for (Eigen::Index i = 0; i < 3000; ++i)
    y(i) = rng.bernoulli(0.3) ? 0.0 : static_cast<double>(rng.negative_binomial(std::exp(1.0 + 0.5 * X(i, 1)), 0.5));
  auto nb = fit_nb2(y, X);
  auto zi = fit_zinb(y, X, X);
  CHECK(zi.loglik >= nb.loglik - 1e-9);
  CHECK(zi.inflate_names == std::vector<std::string>{"z0", "z1"});
  CHECK(zi.free_parameters() == 5);
  auto v = vuong_test(zi, nb, y, X, X);
  REQUIRE(v.defined());
  CHECK(*v.statistic > 1.96);

  Eigen::VectorXd positive = y.array() + 1.0;
  CHECK(code_of([&] { fit_zinb(positive, X, X); }) == ErrorCode::NoZeros);
}

TEST_CASE("analytic likelihood gradients agree with central differences") {
  Rng rng(6);
  const Eigen::Index n = 300;
  RowMatrix X(n, 2);
  Eigen::VectorXd ycens(n), ycount(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = rng.normal();
    ycens(i) = std::max(0.0, X(i, 1) + rng.normal());
    ycount(i) = rng.bernoulli(0.2) ? 0.0 : static_cast<double>(rng.negative_binomial(std::exp(0.5 + 0.3 * X(i, 1)), 0.7));
  }
  std::vector<LogLikelihood> lls;
  lls.emplace_back(std::vector<RowMatrix>{X, LogLikelihood::ones(n)}, std::make_shared<TobitKernel>(ycens, 0.0));
  lls.emplace_back(std::vector<RowMatrix>{X, LogLikelihood::ones(n)}, std::make_shared<NegBinKernel>(ycount));
  lls.emplace_back(std::vector<RowMatrix>{X, X, LogLikelihood::ones(n)}, std::make_shared<ZinbKernel>(ycount));
  for (const auto& ll : lls) {
    Eigen::VectorXd theta(ll.dimension());
    for (Eigen::Index k = 0; k < theta.size(); ++k) theta(k) = rng.uniform(-0.5, 0.5);
    auto ev = ll.evaluate(theta, 2);
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      const double h = 1e-6;
      Eigen::VectorXd a = theta, b = theta;
      a(k) += h;
      b(k) -= h;
      const double fd = (ll.value(a) - ll.value(b)) / (2 * h);
      CHECK(std::abs(fd - ev.gradient(k)) <= 1e-6 * std::max(1.0, std::abs(ev.gradient(k))));
      const Eigen::VectorXd gfd = (ll.gradient(a) - ll.gradient(b)) / (2 * h);
      CHECK((gfd - ev.hessian.col(k)).norm() <= 1e-4 * std::max(1.0, ev.hessian.col(k).norm()));
    }
  }
}

TEST_CASE("thread count does not change the likelihood") {
  Rng rng(7);
  const Eigen::Index n = 7000;
  RowMatrix X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1;
    X(i, 1) = rng.normal();
    y(i) = std::max(0.0, X(i, 1) + rng.normal());
  }
  auto kernel = std::make_shared<TobitKernel>(y, 0.0);
  LogLikelihood one({X, LogLikelihood::ones(n)}, kernel, 1), four({X, LogLikelihood::ones(n)}, kernel, 4);
  Eigen::Vector3d t(0.1, 0.9, 0.05);
  auto a = one.evaluate(t, 2), b = four.evaluate(t, 2);
  CHECK(a.value == b.value);
  CHECK(a.gradient == b.gradient);
  CHECK(a.hessian == b.hessian);
}

TEST_CASE("significance stars use strict thresholds") {
  CHECK(significance_stars(0.001) == "***");
  CHECK(significance_stars(0.01) == "**");
  CHECK(significance_stars(0.049) == "**");
  CHECK(significance_stars(0.05) == "*");
  CHECK(significance_stars(0.09) == "*");
  CHECK(significance_stars(0.10) == "");
  CHECK(significance_stars(0.2) == "");
  CHECK(normal_two_sided_p(1.959963984540054) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi2_upper_p(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("Chow and Vuong edge cases") {
  Rng rng(8);
  auto X = design(rng, 400, 2);
  Eigen::VectorXd y(400);
  for (Eigen::Index i = 0; i < 400; ++i) y(i) = std::max(0.0, X(i, 1) + rng.normal());
  auto pooled = fit_tobit(y, X);
  auto a = fit_tobit(y.head(200), X.topRows(200));
  auto b = fit_tobit(y.tail(200), X.bottomRows(200));
  auto chow = chow_test(pooled, a, b);
  REQUIRE(chow.defined());
  CHECK(*chow.statistic >= 0.0);
  CHECK(chow.df == 3);

  // Identical halves: the split adds nothing.
  Eigen::MatrixXd X2(400, 2);
  X2 << X.topRows(200), X.topRows(200);
  Eigen::VectorXd y2(400);
  y2 << y.head(200), y.head(200);
  auto same = chow_test(fit_tobit(y2, X2), a, a);
  CHECK(*same.statistic == doctest::Approx(0.0).epsilon(1e-6));

  auto short_b = fit_tobit(y.tail(150), X.bottomRows(150));
  CHECK(code_of([&] { chow_test(pooled, a, short_b); }) == ErrorCode::MismatchedObservations);
  auto nb_like = a;
  nb_like.kind = ModelKind::NegBin2;
  CHECK(code_of([&] { chow_test(pooled, nb_like, b); }) == ErrorCode::FamilyMismatch);
  auto renamed = a;
  renamed.names[1] = "other";
  CHECK(code_of([&] { chow_test(pooled, renamed, b); }) == ErrorCode::RegressorMismatch);

  // Equal pointwise likelihoods: zero variance, statistic undefined.
  Eigen::VectorXd counts(6);
  counts << 0, 1, 0, 2, 3, 0;
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(6, 1);
  auto nb = fit_nb2(counts, ones, {}, {OptimizerOptions{}, 1, false});
  ModelFit fake = nb;
  fake.kind = ModelKind::Zinb;
  fake.inflate_names = {"z0"};
  fake.gamma = Eigen::VectorXd::Constant(1, -1e6);
  auto v = vuong_test(fake, nb, counts, ones, ones);
  CHECK_FALSE(v.defined());
  CHECK(v.undefined_reason == "sd=0");
}

TEST_CASE("fit report layout") {
  Rng rng(9);
  auto X = design(rng, 300, 2);
  Eigen::VectorXd y(300);
  for (Eigen::Index i = 0; i < 300; ++i) y(i) = std::max(0.0, X(i, 1) + rng.normal());
  auto fit = fit_tobit(y, X, {"const", "x"});
  std::ostringstream out;
  write_fit_report(out, fit);
  const std::string s = out.str();
  CHECK(s.rfind("coef,estimate,std_err,z,p,stars\nconst,", 0) == 0);
  CHECK(s.find("\naux:sigma,") != std::string::npos);
  CHECK(s.find("\nmodel,tobit\n") != std::string::npos);
  CHECK(s.find("\nn_censored,") != std::string::npos);
  CHECK(s.find("\nconverged,true\n") != std::string::npos);
  auto rows = fit.coefficient_table();
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].equation == "aux");
  CHECK(rows[2].name == "sigma");
}
