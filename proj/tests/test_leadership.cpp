#include <sstream>

#include "doctest.h"

#include "rlflow/error.hpp"
#include "rlflow/leadership.hpp"
#include "rlflow/random.hpp"
#include "support.hpp"

using namespace rlflow;

namespace {

Corpus small_corpus() {
  std::vector<InstitutionRecord> reg = {
      testing::institution("A", "P01", 39.9, 116.4), testing::institution("B", "P01", 39.0, 117.2),
      testing::institution("C", "P02", 31.2, 121.5), testing::institution("D", "P02", 30.3, 120.2)};
  std::vector<PaperRecord> papers = {
      testing::paper("P1", 2013, {"A", "B", "C"}),    testing::paper("P2", 2013, {"A", "B", "C", "D"}, 2),
      testing::paper("P3", 2014, {"C", "D"}),         testing::paper("P4", 2014, {"B"}),
      testing::paper("P5", 2010, {"D", "A"}),
  };
  return assemble_corpus(papers, reg).corpus;
}

}  // namespace

TEST_CASE("fractional flows of one paper") {
  auto p = testing::paper("P", 2013, {"A", "B", "C", "D"}, 2);
  auto pf = paper_flows(p, Counting::Fractional);
  REQUIRE(pf.flows.size() == 8);
  Rational total = 0;
  for (const auto& f : pf.flows) {
    CHECK(f.weight == Rational(1, 8));
    total += f.weight;
  }
  CHECK(total == 1);
  CHECK(pf.flows.front().leader == "A");
  CHECK(pf.flows.front().participant == "A");
  CHECK(paper_leader_mass(2, 4) == Rational(3, 8));
}

TEST_CASE("single-institution paper keeps its unit mass on the self-loop") {
  auto pf = paper_flows(testing::paper("P", 2013, {"A"}), Counting::Fractional);
  REQUIRE(pf.flows.size() == 1);
  CHECK(pf.flows[0].weight == 1);
  CHECK(paper_flows(testing::paper("P", 2013, {"A"}), Counting::Full).flows.empty());
  CHECK(paper_leader_mass(1, 1) == 0);
}

TEST_CASE("full counting sends one unit to each other institution") {
  auto pf = paper_flows(testing::paper("P", 2013, {"A", "B", "C"}), Counting::Full);
  REQUIRE(pf.flows.size() == 2);
  for (const auto& f : pf.flows) CHECK(f.weight == 1);
  auto two = paper_flows(testing::paper("P", 2013, {"A", "B", "C"}, 2), Counting::Full);
  CHECK(two.flows.size() == 4);
}

TEST_CASE("network totals, masses and conservation") {
  const Corpus c = small_corpus();
  const Period outcome(2013, 2017);
  auto net = build_network(c, outcome, std::nullopt, Counting::Fractional);
  CHECK(net.paper_count() == 4);
  CHECK(net.exact_total() == 4);
  CHECK(net.institutions().size() == 4);
  CHECK(net.weight("A", "B") == doctest::Approx(1.0 / 3 + 1.0 / 8));
  CHECK(net.weight("B", "B") == 1.0 + 1.0 / 8);
  CHECK_FALSE(net.has_edge("D", "A"));

  auto lm = leadership_mass(net);
  CHECK(lm.at("A") == doctest::Approx(2.0 / 3 + 3.0 / 8));
  CHECK(lm.at("B") == doctest::Approx(3.0 / 8));
  CHECK(lm.at("D") == 0.0);

  auto field = build_network(c, outcome, std::string("nope"), Counting::Fractional);
  CHECK(field.paper_count() == 0);
  CHECK(field.total() == 0.0);
}

TEST_CASE("full-count weights dominate fractional weights per dyad") {
  const Corpus c = small_corpus();
  auto frac = build_network(c, Period(2013, 2017), std::nullopt, Counting::Fractional);
  auto full = build_network(c, Period(2013, 2017), std::nullopt, Counting::Full);
  for (const auto& [dyad, e] : frac.edges())
    if (dyad.first != dyad.second) CHECK(full.weight(dyad.first, dyad.second) >= e.value);
}

TEST_CASE("exact accumulation is independent of paper order") {
  Rng rng(7);
  std::vector<PaperRecord> papers;
  std::vector<InstitutionRecord> reg;
  for (int k = 0; k < 9; ++k) reg.push_back(testing::institution("I" + std::to_string(k), "P", 30, 110 + k));
  for (int q = 0; q < 300; ++q) {
    std::vector<std::string> ids;
    const auto n = 1 + rng.below(6);
    for (std::size_t k = 0; k < n; ++k) ids.push_back("I" + std::to_string((q + 2 * k) % 9));
    papers.push_back(testing::paper("P" + std::to_string(q), 2013, ids, 1 + rng.below(n)));
  }
  FlowNetwork forward(Period(2013, 2013), Counting::Fractional), backward(Period(2013, 2013), Counting::Fractional);
  for (const auto& p : papers)
    for (const auto& f : paper_flows(p, Counting::Fractional).flows) forward.add(f);
  for (auto it = papers.rbegin(); it != papers.rend(); ++it)
    for (const auto& f : paper_flows(*it, Counting::Fractional).flows) backward.add(f);
  REQUIRE(forward.edges().size() == backward.edges().size());
  for (const auto& [dyad, e] : forward.edges()) CHECK(backward.edges().at(dyad).value == e.value);
  CHECK(forward.exact_total() == 300);
}

TEST_CASE("disparity follows the normalized concentration formula") {
  auto even = FlowNetwork::from_edges(Period(2013, 2013), Counting::Fractional,
                                      {{"A", "B", 1}, {"A", "C", 1}, {"A", "D", 1}, {"A", "E", 1}, {"A", "A", 5}});
  auto d = disparity(even, "A");
  REQUIRE(d.defined());
  CHECK(*d.value == doctest::Approx(-0.125).epsilon(1e-15));
  CHECK(d.participants == 4);

  auto peaked = FlowNetwork::from_edges(Period(2013, 2013), Counting::Fractional,
                                        {{"A", "B", 1e9}, {"A", "C", 1}, {"A", "D", 1}});
  CHECK(*disparity(peaked, "A").value == doctest::Approx(1.0).epsilon(1e-8));

  auto pair = FlowNetwork::from_edges(Period(2013, 2013), Counting::Fractional, {{"A", "B", 1}, {"A", "C", 2}});
  CHECK_FALSE(disparity(pair, "A").defined());
  CHECK(disparity(pair, "A").undefined_reason == "N<=2");
  CHECK_FALSE(disparity(pair, "B").defined());
  CHECK_THROWS_AS(disparity(pair, "Z"), Error);

  auto dist = disparity_distribution(even);
  CHECK(dist.values.size() == 1);
  CHECK(dist.omitted == 4);
}

TEST_CASE("rankings") {
  auto net = FlowNetwork::from_edges(Period(2013, 2013), Counting::Fractional,
                                     {{"A", "B", 2}, {"B", "A", 2}, {"C", "A", 1}, {"A", "A", 9}, {"C", "B", 0.5}});
  auto r = rank_by_mass(leadership_mass(net), 10);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].institution_id == "A");
  CHECK(r.rows[1].institution_id == "B");
  CHECK(r.rows.back().cumulative_share == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rank_by_mass(leadership_mass(net), 1).rows.size() == 1);
  CHECK_THROWS_AS(rank_by_mass(leadership_mass(net), 0), Error);

  auto dy = rank_dyads(net, 3);
  REQUIRE(dy.size() == 3);
  CHECK(dy[0] == DyadFlow{"A", "B", 2});
  CHECK(dy[1] == DyadFlow{"B", "A", 2});
  CHECK(dy[2] == DyadFlow{"C", "A", 1});

  auto zero = rank_by_mass({{"A", 0.0}, {"B", 0.0}}, 5);
  CHECK(zero.zero_total);
}

TEST_CASE("province aggregation excludes self-loops") {
  const Corpus c = small_corpus();
  auto net = build_network(c, Period(2013, 2017), std::nullopt, Counting::Fractional);
  auto regions = aggregate_by_region(net, c.registry());
  double total = 0.0;
  for (const auto& [k, v] : regions) total += v;
  double non_self = 0.0;
  for (const auto& [dyad, e] : net.edges())
    if (dyad.first != dyad.second) non_self += e.value;
  CHECK(total == doctest::Approx(non_self));
  CHECK(regions.at({"P01", "P02"}) == doctest::Approx(1.0 / 3 + 4.0 / 8));
}

TEST_CASE("edge list output is sorted and round-trip precise") {
  auto net = FlowNetwork::from_edges(Period(2013, 2013), Counting::Fractional, {{"B", "A", 0.1}, {"A", "B", 1.0 / 3}});
  std::ostringstream out;
  write_edge_list(out, net);
  CHECK(out.str() == "leader_id,participant_id,flow\nA,B,0.3333333333333333\nB,A,0.1\n");
  CHECK_THROWS_AS(FlowNetwork::from_edges(Period(2013, 2013), Counting::Fractional, {{"A", "B", -1}}), Error);
}
