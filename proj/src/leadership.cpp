#include "rlflow/leadership.hpp"

#include <algorithm>

#include "rlflow/csv.hpp"

namespace rlflow {

std::string to_string(Counting counting) {
  return counting == Counting::Fractional ? "fractional" : "full";
}

Counting parse_counting(std::string_view text) {
  if (text == "fractional") return Counting::Fractional;
  if (text == "full") return Counting::Full;
  throw Error(ErrorCode::InvalidArgument, "counting must be fractional or full: " + std::string(text));
}

PaperFlows paper_flows(const PaperRecord& paper, Counting counting) {
  PaperFlows out{paper.paper_id, {}};
  const auto n = paper.institution_count();
  const auto lin = paper.leader_count();
  if (counting == Counting::Fractional) {
    Rational w(1, static_cast<long long>(lin * n));
    out.flows.reserve(lin * n);
    for (const auto& leader : paper.affiliations) {
      if (!leader.is_leading) continue;
      for (const auto& other : paper.affiliations)
        out.flows.push_back({leader.institution_id, other.institution_id, w});
    }
  } else {
    for (const auto& leader : paper.affiliations) {
      if (!leader.is_leading) continue;
      for (const auto& other : paper.affiliations)
        if (other.institution_id != leader.institution_id)
          out.flows.push_back({leader.institution_id, other.institution_id, Rational(1)});
    }
  }
  std::sort(out.flows.begin(), out.flows.end(), [](const Flow& a, const Flow& b) {
    return std::tie(a.leader, a.participant) < std::tie(b.leader, b.participant);
  });
  return out;
}

Rational paper_leader_mass(std::size_t leaders, std::size_t institutions) {
  return Rational(1, static_cast<long long>(leaders)) *
         (Rational(1) - Rational(1, static_cast<long long>(institutions)));
}

FlowNetwork FlowNetwork::from_edges(
    Period period, Counting counting,
    const std::vector<std::tuple<InstitutionId, InstitutionId, double>>& edges) {
  FlowNetwork net(period, counting);
  for (const auto& [a, b, w] : edges) {
    if (!(w >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative flow " + a + "->" + b);
    net.add_institution(a);
    net.add_institution(b);
    if (w > 0.0) net.add({a, b, Rational(w)});
  }
  return net;
}

void FlowNetwork::add(const Flow& flow) {
  institutions_.insert(flow.leader);
  institutions_.insert(flow.participant);
  auto& e = edges_[{flow.leader, flow.participant}];
  e.exact += flow.weight;
  e.value = e.exact.convert_to<double>();
}

double FlowNetwork::weight(const InstitutionId& leader, const InstitutionId& participant) const {
  auto it = edges_.find({leader, participant});
  return it == edges_.end() ? 0.0 : it->second.value;
}

bool FlowNetwork::has_edge(const InstitutionId& leader, const InstitutionId& participant) const {
  return edges_.count({leader, participant}) != 0;
}

Rational FlowNetwork::exact_total() const {
  Rational total = 0;
  for (const auto& [_, e] : edges_) total += e.exact;
  return total;
}

FlowNetwork build_network(const Corpus& corpus, const Period& period,
                          const std::optional<std::string>& field, Counting counting) {
  FlowNetwork net(period, counting);
  // Corpus papers are held in ascending paper_id order.
  for (const auto& paper : corpus.papers()) {
    if (!period.contains(paper.year) || (field && paper.field != *field)) continue;
    net.count_paper();
    for (const auto& a : paper.affiliations) net.add_institution(a.institution_id);
    for (const auto& f : paper_flows(paper, counting).flows) net.add(f);
  }
  return net;
}

MassVector leadership_mass(const FlowNetwork& network) {
  std::map<InstitutionId, Rational> exact;
  for (const auto& id : network.institutions()) exact[id] = 0;
  for (const auto& [dyad, e] : network.edges())
    if (dyad.first != dyad.second) exact[dyad.first] += e.exact;
  MassVector out;
  for (const auto& [id, m] : exact) out.emplace(id, m.convert_to<double>());
  return out;
}

MassRanking rank_by_mass(const MassVector& masses, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  std::vector<std::pair<InstitutionId, double>> sorted(masses.begin(), masses.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  MassRanking out;
  for (const auto& [_, m] : sorted) out.total += m;
  out.zero_total = !(out.total > 0.0);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < std::min(k, sorted.size()); ++i) {
    double share = out.zero_total ? 0.0 : sorted[i].second / out.total;
    cumulative = out.zero_total ? 0.0 : cumulative + share;
    out.rows.push_back({sorted[i].first, sorted[i].second, share, cumulative});
  }
  return out;
}

std::vector<DyadFlow> rank_dyads(const FlowNetwork& network, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  std::vector<DyadFlow> all;
  for (const auto& [dyad, e] : network.edges())
    if (dyad.first != dyad.second) all.push_back({dyad.first, dyad.second, e.value});
  // edges() iterates in (leader, participant) order, so a stable sort keeps
  // the lexicographic tie-break.
  std::stable_sort(all.begin(), all.end(),
                   [](const DyadFlow& a, const DyadFlow& b) { return a.flow > b.flow; });
  if (all.size() > k) all.resize(k);
  return all;
}

DisparityResult disparity(const FlowNetwork& network, const InstitutionId& institution) {
  if (!network.institutions().count(institution))
    throw Error(ErrorCode::UnknownInstitution, institution + " not in network");
  DisparityResult out;
  std::vector<Rational> flows;
  Rational mass = 0;
  auto it = network.edges().lower_bound({institution, std::string()});
  for (; it != network.edges().end() && it->first.first == institution; ++it) {
    if (it->first.second == institution) continue;
    flows.push_back(it->second.exact);
    mass += it->second.exact;
  }
  out.participants = flows.size();
  if (mass == 0) {
    out.undefined_reason = "LM=0";
    return out;
  }
  if (flows.size() <= 2) {
    out.undefined_reason = "N<=2";
    return out;
  }
  Rational sum_sq = 0;
  for (const auto& f : flows) {
    Rational s = f / mass;
    sum_sq += s * s;
  }
  const auto n = static_cast<long long>(flows.size());
  Rational value = (Rational(n - 1) * sum_sq - 1) / Rational(n - 2);
  out.value = value.convert_to<double>();
  return out;
}

DisparityDistribution disparity_distribution(const FlowNetwork& network) {
  DisparityDistribution out;
  for (const auto& id : network.institutions()) {
    auto d = disparity(network, id);
    if (d.defined())
      out.values.emplace_back(id, *d.value);
    else
      ++out.omitted;
  }
  return out;
}

RegionFlows aggregate_by_region(const FlowNetwork& network,
                                const std::map<InstitutionId, InstitutionRecord>& registry) {
  auto province = [&](const InstitutionId& id) -> const std::string& {
    auto it = registry.find(id);
    if (it == registry.end()) throw Error(ErrorCode::UnknownInstitution, id);
    return it->second.province;
  };
  std::map<std::pair<std::string, std::string>, Rational> exact;
  for (const auto& [dyad, e] : network.edges()) {
    if (dyad.first == dyad.second) continue;
    exact[{province(dyad.first), province(dyad.second)}] += e.exact;
  }
  RegionFlows out;
  for (const auto& [key, v] : exact) out.emplace(key, v.convert_to<double>());
  return out;
}

void write_edge_list(std::ostream& out, const FlowNetwork& network) {
  csv::write_row(out, {"leader_id", "participant_id", "flow"});
  for (const auto& [dyad, e] : network.edges())
    csv::write_row(out, {dyad.first, dyad.second, csv::format_double(e.value)});
}

void write_mass_ranking(std::ostream& out, const MassRanking& ranking) {
  csv::write_row(out, {"institution_id", "LM", "share", "cumulative_share"});
  for (const auto& r : ranking.rows)
    csv::write_row(out, {r.institution_id, csv::format_double(r.mass), csv::format_double(r.share),
                         csv::format_double(r.cumulative_share)});
}

void write_dyad_ranking(std::ostream& out, const std::vector<DyadFlow>& dyads,
                        const std::map<InstitutionId, InstitutionRecord>& registry) {
  auto name = [&](const InstitutionId& id) {
    auto it = registry.find(id);
    return it == registry.end() ? std::pair<std::string, std::string>{"", ""}
                                : std::pair{it->second.display_name, it->second.province};
  };
  csv::write_row(out, {"leader_id", "leader_name", "leader_province", "participant_id",
                       "participant_name", "participant_province", "flow"});
  for (const auto& d : dyads) {
    auto [ln, lp] = name(d.leader);
    auto [pn, pp] = name(d.participant);
    csv::write_row(out, {d.leader, ln, lp, d.participant, pn, pp, csv::format_double(d.flow)});
  }
}

void write_region_flows(std::ostream& out, const RegionFlows& flows) {
  csv::write_row(out, {"leader_province", "participant_province", "flow"});
  for (const auto& [key, v] : flows) csv::write_row(out, {key.first, key.second, csv::format_double(v)});
}

}  // namespace rlflow
