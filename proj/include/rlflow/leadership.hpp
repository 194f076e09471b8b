#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rlflow/corpus.hpp"

namespace rlflow {

using Rational = boost::multiprecision::cpp_rational;

enum class Counting { Fractional, Full };

std::string to_string(Counting counting);
Counting parse_counting(std::string_view text);

using Dyad = std::pair<InstitutionId, InstitutionId>;  // (leader, participant)

struct Flow {
  InstitutionId leader;
  InstitutionId participant;
  Rational weight;

  double value() const { return weight.convert_to<double>(); }
};

struct PaperFlows {
  std::string paper_id;
  std::vector<Flow> flows;
};

// Fractional: every leader sends 1/(LIN*N) to every institution of the paper,
// itself and co-leaders included. Full: every leader sends 1 to every other
// institution, no self-loops.
PaperFlows paper_flows(const PaperRecord& paper, Counting counting);

// (1/LIN)(1 - 1/N), the non-self-loop mass one leader earns from one paper.
Rational paper_leader_mass(std::size_t leaders, std::size_t institutions);

// Directed leadership-flow graph. Edge weights are accumulated as exact
// rationals, so the stored doubles are correctly rounded and independent of
// summation order.
class FlowNetwork {
public:
  struct Edge {
    Rational exact;
    double value = 0.0;
  };

  FlowNetwork() = default;
  FlowNetwork(Period period, Counting counting) : period_(period), counting_(counting) {}

  // For hand-built networks; entries with the same dyad are summed.
  static FlowNetwork from_edges(Period period, Counting counting,
                                const std::vector<std::tuple<InstitutionId, InstitutionId, double>>& edges);

  void add(const Flow& flow);
  void add_institution(const InstitutionId& id) { institutions_.insert(id); }
  void count_paper() { ++paper_count_; }

  const Period& period() const noexcept { return period_; }
  Counting counting() const noexcept { return counting_; }
  const std::map<Dyad, Edge>& edges() const noexcept { return edges_; }
  const std::set<InstitutionId>& institutions() const noexcept { return institutions_; }
  std::size_t paper_count() const noexcept { return paper_count_; }

  double weight(const InstitutionId& leader, const InstitutionId& participant) const;
  bool has_edge(const InstitutionId& leader, const InstitutionId& participant) const;
  Rational exact_total() const;
  double total() const { return exact_total().convert_to<double>(); }

private:
  Period period_;
  Counting counting_ = Counting::Fractional;
  std::map<Dyad, Edge> edges_;
  std::set<InstitutionId> institutions_;
  std::size_t paper_count_ = 0;
};

FlowNetwork build_network(const Corpus& corpus, const Period& period,
                          const std::optional<std::string>& field, Counting counting);

using MassVector = std::map<InstitutionId, double>;

// LM_a: outgoing flow excluding the self-loop. Every institution in the
// network gets an entry.
MassVector leadership_mass(const FlowNetwork& network);

struct MassRank {
  InstitutionId institution_id;
  double mass = 0.0;
  double share = 0.0;
  double cumulative_share = 0.0;
};

struct MassRanking {
  std::vector<MassRank> rows;
  double total = 0.0;
  bool zero_total = false;
};

MassRanking rank_by_mass(const MassVector& masses, std::size_t k);

struct DyadFlow {
  InstitutionId leader;
  InstitutionId participant;
  double flow = 0.0;

  friend bool operator==(const DyadFlow&, const DyadFlow&) = default;
};

std::vector<DyadFlow> rank_dyads(const FlowNetwork& network, std::size_t k);

struct DisparityResult {
  std::optional<double> value;
  std::size_t participants = 0;
  std::string undefined_reason;

  bool defined() const noexcept { return value.has_value(); }
};

// Normalized concentration of an institution's outgoing (non-self) flow.
// Undefined when it led two or fewer participants or has zero mass.
DisparityResult disparity(const FlowNetwork& network, const InstitutionId& institution);

struct DisparityDistribution {
  std::vector<std::pair<InstitutionId, double>> values;
  std::size_t omitted = 0;
};

DisparityDistribution disparity_distribution(const FlowNetwork& network);

using RegionFlows = std::map<std::pair<std::string, std::string>, double>;

RegionFlows aggregate_by_region(const FlowNetwork& network,
                                const std::map<InstitutionId, InstitutionRecord>& registry);

void write_edge_list(std::ostream& out, const FlowNetwork& network);
void write_mass_ranking(std::ostream& out, const MassRanking& ranking);
void write_dyad_ranking(std::ostream& out, const std::vector<DyadFlow>& dyads,
                        const std::map<InstitutionId, InstitutionRecord>& registry);
void write_region_flows(std::ostream& out, const RegionFlows& flows);

}  // namespace rlflow
