#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"

#include "rlflow/error.hpp"
#include "rlflow/proximity.hpp"
#include "support.hpp"

using namespace rlflow;

namespace {

// Central angle from unit vectors with atan2, in long double.
long double vector_distance(long double lat1, long double lon1, long double lat2, long double lon2) {
  const long double d = std::numbers::pi_v<long double> / 180.0L;
  auto unit = [d](long double lat, long double lon) {
    return std::array<long double, 3>{std::cos(lat * d) * std::cos(lon * d), std::cos(lat * d) * std::sin(lon * d),
                                      std::sin(lat * d)};
  };
  auto a = unit(lat1, lon1), b = unit(lat2, lon2);
  const std::array<long double, 3> c = {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
  const long double cross = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
  const long double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return 6371.0088L * std::atan2(cross, dot);
}

}  // namespace

TEST_CASE("haversine agrees with an independent formula") {
  const double pairs[][4] = {{39.9042, 116.4074, 31.2304, 121.4737}, {0, 0, 0, 90},       {-33.9, 18.4, 51.5, -0.1},
                             {10, 179.9, 10, -179.9},                {89.9, 0, -89.9, 180}, {22.5, 114.1, 22.5001, 114.1}};
  for (const auto& p : pairs) {
    const double ours = geo_distance(p[0], p[1], p[2], p[3]);
    const double ref = static_cast<double>(vector_distance(p[0], p[1], p[2], p[3]));
    CHECK(ours == doctest::Approx(ref).epsilon(1e-9));
  }
  CHECK(geo_distance(30, 100, 30, 100) == 0.0);
  CHECK(geo_distance(0, 0, 0, 180) == doctest::Approx(std::numbers::pi * kEarthRadiusKm).epsilon(1e-12));
  CHECK_THROWS_AS(geo_distance(91, 0, 0, 0), Error);
  CHECK_THROWS_AS(geo_distance(0, 0, 0, 181), Error);
}

TEST_CASE("cosine proximity") {
  Eigen::VectorXd a(3), b(3), z = Eigen::VectorXd::Zero(3);
  a << 1, 2, 0;
  b << 2, 4, 0;
  CHECK(cognitive_proximity(a, b) == doctest::Approx(1.0));
  CHECK(cognitive_proximity(a, b) <= 1.0);
  b << 0, 0, 3;
  CHECK(cognitive_proximity(a, b) == 0.0);
  CHECK_THROWS_AS(cognitive_proximity(a, z), Error);
}

TEST_CASE("institutional, social and economic proximity") {
  Registry reg;
  reg["A"] = testing::institution("A", "P1", 30, 110, 100);
  reg["B"] = testing::institution("B", "P1", 31, 111, 40);
  reg["C"] = testing::institution("C", "P2", 32, 112, 40);
  reg["D"] = testing::institution("D", "P2", 33, 113);
  reg["D"].nsfc_counts.clear();
  CHECK(institutional_proximity(reg, "A", "B") == 1);
  CHECK(institutional_proximity(reg, "A", "C") == 0);
  const Period lag(2008, 2012);
  CHECK(economic_proximity(reg, "A", "B", lag) == 60);
  CHECK(economic_proximity(reg, "B", "C", lag) == 0);
  try {
    economic_proximity(reg, "A", "D", lag);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingNsfcCount);
  }
  auto prior = FlowNetwork::from_edges(lag, Counting::Fractional, {{"B", "A", 0.5}, {"A", "A", 1}});
  CHECK(social_proximity(prior, "A", "B") == 1);
  CHECK(social_proximity(prior, "B", "A") == 1);
  CHECK(social_proximity(prior, "A", "C") == 0);
}

TEST_CASE("design matrix columns, guards and round trip") {
  Registry reg;
  reg["A"] = testing::institution("A", "P1", 30, 110, 100);
  reg["B"] = testing::institution("B", "P1", 30, 110, 40);  // co-located: geo floor applies
  reg["C"] = testing::institution("C", "P2", 32, 115, 41);
  std::map<InstitutionId, Eigen::VectorXd> vec;
  vec["A"] = Eigen::Vector2d(1, 0);
  vec["B"] = Eigen::Vector2d(0, 1);  // orthogonal to A: cosine floor applies
  vec["C"] = Eigen::Vector2d(1, 1);
  const Period lag(2008, 2012), out(2013, 2017);
  auto lag_net = FlowNetwork::from_edges(lag, Counting::Fractional, {{"A", "B", 1}, {"B", "C", 2}, {"C", "A", 0.5}});
  auto out_net = FlowNetwork::from_edges(out, Counting::Fractional, {{"A", "C", 3}});
  const std::set<InstitutionId> eligible = {"A", "B", "C"};
  auto prox = compute_proximity_set(reg, vec, lag_net, lag, eligible);
  CHECK(prox.size() == 6);
  auto data = build_design_matrix(out_net, lag_net, leadership_mass(lag_net), prox, eligible);
  REQUIRE(data.rows() == 6);
  CHECK(data.columns == kDesignColumns);
  CHECK(data.dyads[0] == Dyad{"A", "B"});
  CHECK(data.dyads[1] == Dyad{"A", "C"});
  CHECK(data.y(1) == 3.0);
  CHECK(data.y(0) == 0.0);
  const auto X = data.X;
  CHECK(X(0, data.column_index("const")) == 1.0);
  CHECK(X(0, data.column_index("ln_LM_i")) == doctest::Approx(std::log(1.0)));
  CHECK(X(0, data.column_index("ln_LM_j")) == doctest::Approx(std::log(2.0)));
  CHECK(X(0, data.column_index("ln_geo")) == 0.0);
  CHECK(X(0, data.column_index("ln_cogn")) == doctest::Approx(std::log(1e-6)));
  CHECK(X(0, data.column_index("inst")) == 1.0);
  CHECK(X(0, data.column_index("soc")) == 1.0);
  CHECK(X(0, data.column_index("ln_econ")) == doctest::Approx(std::log1p(60.0)));
  CHECK(X(1, data.column_index("soc")) == 1.0);

  std::ostringstream os;
  write_design_matrix(os, data);
  std::istringstream is(os.str());
  auto back = read_design_matrix(is);
  CHECK(back.dyads == data.dyads);
  CHECK(back.y == data.y);
  CHECK(back.X == data.X);
  CHECK(back.columns == data.columns);
}

TEST_CASE("non-finite regressors are refused") {
  Registry reg;
  reg["A"] = testing::institution("A", "P1", 30, 110);
  reg["B"] = testing::institution("B", "P1", 31, 111);
  std::map<InstitutionId, Eigen::VectorXd> vec = {{"A", Eigen::Vector2d(1, 0)}, {"B", Eigen::Vector2d(1, 1)}};
  const Period lag(2008, 2012);
  auto lag_net = FlowNetwork::from_edges(lag, Counting::Fractional, {{"A", "B", 1}});
  auto prox = compute_proximity_set(reg, vec, lag_net, lag, {"A", "B"});
  try {
    build_design_matrix(lag_net, lag_net, leadership_mass(lag_net), prox, {"A", "B"});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteRegressor);
  }
}
