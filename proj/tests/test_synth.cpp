#include <cmath>
#include <map>

#include "doctest.h"

#include "rlflow/error.hpp"
#include "rlflow/leadership.hpp"
#include "rlflow/proximity.hpp"
#include "rlflow/synth.hpp"

using namespace rlflow;

TEST_CASE("tabular generators are seed deterministic") {
  DgpConfig c;
  c.rows = 2000;
  auto a = gen_tobit_dataset(c), b = gen_tobit_dataset(c);
  CHECK(a.X == b.X);
  CHECK(a.y == b.y);
  c.seed = 2;
  CHECK_FALSE(gen_tobit_dataset(c).y == a.y);
  CHECK(a.names.front() == "const");
  CHECK(a.X.col(0).isOnes());
}

TEST_CASE("zero residual sd gives the censored linear index") {
  DgpConfig c;
  c.rows = 500;
  c.sigma = 0.0;
  auto d = gen_tobit_dataset(c);
  const Eigen::VectorXd index = d.X * d.beta;
  for (Eigen::Index i = 0; i < 500; ++i) CHECK(d.y(i) == std::max(0.0, index(i)));
}

TEST_CASE("censoring target and default censoring") {
  DgpConfig c;
  c.rows = 100000;
  c.beta = {{"const", 1.0}, {"x1", -2.0}, {"x2", 0.5}};
  c.sigma = 1.0;
  c.censoring_target = 0.4;
  auto d = gen_tobit_dataset(c);
  CHECK(d.censoring_share == doctest::Approx(0.4).epsilon(0.05));
  const double observed = (d.y.array() <= 0.0).cast<double>().mean();
  CHECK(std::abs(observed - 0.4) < 0.02);

  DgpConfig def;
  def.rows = 20000;
  auto dd = gen_tobit_dataset(def);
  const double share = (dd.y.array() <= 0.0).cast<double>().mean();
  CHECK(share > 0.70);
  CHECK(share < 0.90);
  for (Eigen::Index i = 0; i < dd.X.rows(); ++i) {
    const auto inst = dd.X(i, 5);
    CHECK((inst == 0.0 || inst == 1.0));
  }
}

TEST_CASE("count generators") {
  DgpConfig c;
  c.rows = 50000;
  c.count_beta = {{"const", 1.0}};
  auto p = gen_count_dataset(c, CountKind::Poisson);
  const double mean = p.y.mean();
  const double var = (p.y.array() - mean).square().sum() / (p.y.size() - 1);
  CHECK(var / mean > 0.9);
  CHECK(var / mean < 1.1);

  auto nb = gen_count_dataset(c, CountKind::NegBin);
  CHECK(nb.alpha == 0.5);
  c.inflate_gamma = {{"const", -30.0}};
  auto zi = gen_count_dataset(c, CountKind::Zinb);
  const double z_nb = (nb.y.array() == 0.0).cast<double>().mean();
  const double z_zi = (zi.y.array() == 0.0).cast<double>().mean();
  CHECK(std::abs(z_nb - z_zi) < 0.01);
  CHECK(parse_count_kind("nb2") == CountKind::NegBin);
  CHECK_THROWS_AS(parse_count_kind("tobit"), Error);
}

TEST_CASE("generated corpus is deterministic and geographically plausible") {
  DgpConfig c;
  c.institutions = 30;
  c.papers_per_year = 150;
  auto a = gen_corpus(c), b = gen_corpus(c);
  REQUIRE(a.papers().size() == b.papers().size());
  CHECK(a.papers() == b.papers());
  CHECK(a.registry() == b.registry());
  CHECK(a.papers().size() == 150 * 10);

  // Conservation on the generated corpus.
  auto net = build_network(a, Period(2008, 2017), std::nullopt, Counting::Fractional);
  CHECK(net.exact_total() == Rational(static_cast<long long>(a.papers().size())));

  // Collaborating pairs are closer on average than random pairs.
  const Registry& reg = a.registry();
  double linked = 0.0, all = 0.0;
  std::size_t n_all = 0;
  for (const auto& [dyad, e] : net.edges()) {
    if (dyad.first == dyad.second) continue;
    const auto &i = reg.at(dyad.first), &j = reg.at(dyad.second);
    linked += geo_distance(i.latitude, i.longitude, j.latitude, j.longitude) * e.value;
    all += e.value;
  }
  double pair_mean = 0.0;
  for (const auto& [id_i, i] : reg)
    for (const auto& [id_j, j] : reg)
      if (id_i != id_j) {
        pair_mean += geo_distance(i.latitude, i.longitude, j.latitude, j.longitude);
        ++n_all;
      }
  CHECK(linked / all < pair_mean / static_cast<double>(n_all));
}

TEST_CASE("generator configuration is validated") {
  DgpConfig c;
  c.institutions = 1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = DgpConfig{};
  c.lag_period = Period(2013, 2014);
  CHECK_THROWS_AS(c.validate(), Error);
}
