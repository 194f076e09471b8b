#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"

#include "rlflow/diagnostics.hpp"
#include "rlflow/error.hpp"
#include "rlflow/random.hpp"

using namespace rlflow;

TEST_CASE("VIF of an orthogonal design is one") {
  // +-1 Hadamard columns are exactly orthogonal and centred.
  Eigen::MatrixXd X(8, 4);
  for (int i = 0; i < 8; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = (i & 1) ? 1.0 : -1.0;
    X(i, 2) = (i & 2) ? 1.0 : -1.0;
    X(i, 3) = (i & 4) ? 1.0 : -1.0;
  }
  auto v = vif(X, {"const", "a", "b", "c"});
  REQUIRE(v.size() == 3);
  for (const auto& row : v) CHECK(row.vif == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(v[0].column == "a");
}

TEST_CASE("VIF of a pair with sample correlation 0.6 is 1/(1 - 0.36)") {
  // u, w centred and orthonormal; b = 0.6 u + 0.8 w has correlation exactly 0.6 with u.
  Eigen::MatrixXd X(4, 3);
  const double u[4] = {1, -1, 1, -1}, w[4] = {1, 1, -1, -1};
  for (int i = 0; i < 4; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = u[i];
    X(i, 2) = 0.6 * u[i] + 0.8 * w[i];
  }
  auto v = vif(X, {"const", "a", "b"});
  for (const auto& row : v) CHECK(row.vif == doctest::Approx(1.5625).epsilon(1e-12));
}

TEST_CASE("near and exact duplicates") {
  Rng rng(1);
  Eigen::MatrixXd X(500, 3);
  for (int i = 0; i < 500; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = rng.normal();
    X(i, 2) = X(i, 1) + 1e-4 * rng.normal();
  }
  CHECK(vif(X, {"c", "a", "b"})[1].vif > 1e6);
  X.col(2) = 3.0 * X.col(1);
  try {
    vif(X, {"c", "a", "b"});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
}

TEST_CASE("descriptive statistics") {
  Rng rng(2);
  Eigen::MatrixXd D(1000, 3);
  for (int i = 0; i < 1000; ++i) {
    D(i, 0) = rng.normal(5, 2);
    D(i, 1) = D(i, 0) + rng.normal();
    D(i, 2) = 7.0;
  }
  auto s = descriptive_stats(D, {"a", "b", "k"});
  CHECK(s.n == 1000);
  CHECK(s.mean[2] == 7.0);
  CHECK(s.sd[2] == 0.0);
  CHECK(*s.r[0][0] == doctest::Approx(1.0));
  CHECK(*s.r[1][0] > 0.85);
  CHECK(*s.p[1][0] < 1e-10);
  CHECK_FALSE(s.r[2][0].has_value());
  CHECK_FALSE(s.p[2][1].has_value());
  std::ostringstream out;
  write_descriptive_table(out, s, {});
  CHECK(out.str().rfind("variable,mean,sd,vif,1,2,3\n", 0) == 0);
}

TEST_CASE("independent columns are rarely flagged as correlated") {
  int large_p = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(1000 + seed);
    Eigen::MatrixXd D(10000, 2);
    for (Eigen::Index i = 0; i < D.rows(); ++i) D(i, 0) = rng.normal(), D(i, 1) = rng.normal();
    const auto s = descriptive_stats(D, {"a", "b"});
    CHECK(std::abs(*s.r[1][0]) < 0.05);
    if (*s.p[1][0] > 0.01) ++large_p;
  }
  CHECK(large_p >= 90);
}

TEST_CASE("kernel density estimate") {
  const double h = 0.3;
  auto single = kde({2.0}, h);
  double peak = 0.0;
  for (double d : single.density) peak = std::max(peak, d);
  CHECK(kde_density({2.0}, h, 2.0) == doctest::Approx(1.0 / (h * std::sqrt(2 * std::numbers::pi))).epsilon(1e-12));
  CHECK(single.x.size() == kKdeGridPoints);
  CHECK(single.x.front() == doctest::Approx(2.0 - 3 * h));
  CHECK(single.x.back() == 2.0 + 3 * h);

  auto sym = kde({-1.0, 1.0}, 0.5);
  for (std::size_t k = 0; k < sym.x.size(); ++k)
    CHECK(sym.density[k] == doctest::Approx(sym.density[sym.x.size() - 1 - k]).epsilon(1e-12));

  Rng rng(4);
  std::vector<double> sample;
  for (int i = 0; i < 300; ++i) sample.push_back(rng.uniform());
  const double bw = silverman_bandwidth(sample);
  CHECK(bw > 0.0);
  CHECK(kde_integral(kde(sample)) == doctest::Approx(1.0).epsilon(1e-3));

  CHECK_THROWS_AS(silverman_bandwidth({1.0}), Error);
  CHECK_THROWS_AS(silverman_bandwidth({1.0, 1.0, 1.0}), Error);
  CHECK_THROWS_AS(kde({1.0}, 0.0), Error);

  std::ostringstream out;
  write_kde(out, sym);
  CHECK(out.str().rfind("x,density\n", 0) == 0);
}
