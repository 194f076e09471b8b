#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rlflow/corpus.hpp"
#include "rlflow/leadership.hpp"

namespace rlflow {

inline constexpr double kEarthRadiusKm = 6371.0088;

// Haversine great-circle distance in kilometres.
double geo_distance(double lat1, double lon1, double lat2, double lon2);

// Cosine similarity of two non-negative vectors. Throws ZeroVector.
double cognitive_proximity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

using Registry = std::map<InstitutionId, InstitutionRecord>;

// 1 when both institutions share a province code.
int institutional_proximity(const Registry& registry, const InstitutionId& i, const InstitutionId& j);

// 1 when either direction carried positive flow in the prior network.
int social_proximity(const FlowNetwork& prior, const InstitutionId& i, const InstitutionId& j);

// |nsfc_i - nsfc_j| for `period`. Throws MissingNsfcCount.
long long economic_proximity(const Registry& registry, const InstitutionId& i, const InstitutionId& j,
                             const Period& period);

struct DyadProximity {
  double geo_km = 0.0;
  double cogn = 0.0;
  int inst = 0;
  int soc = 0;
  long long econ_gap = 0;
};

class ProximitySet {
public:
  void set(const InstitutionId& i, const InstitutionId& j, const DyadProximity& p) { values_[{i, j}] = p; }
  const DyadProximity& at(const InstitutionId& i, const InstitutionId& j) const;
  bool contains(const InstitutionId& i, const InstitutionId& j) const { return values_.count({i, j}) != 0; }
  std::size_t size() const noexcept { return values_.size(); }

private:
  std::map<Dyad, DyadProximity> values_;
};

// All ordered dyads over `institutions`. `vectors` must hold a non-zero topic
// vector for every institution.
ProximitySet compute_proximity_set(const Registry& registry,
                                   const std::map<InstitutionId, Eigen::VectorXd>& vectors,
                                   const FlowNetwork& prior_network, const Period& econ_period,
                                   const std::set<InstitutionId>& institutions);

struct TransformGuards {
  double geo_floor_km = 1.0;
  double cogn_floor = 1e-6;
};

inline const std::vector<std::string> kDesignColumns = {"const", "ln_LM_i", "ln_LM_j", "ln_geo",
                                                        "ln_cogn", "inst", "soc", "ln_econ"};

struct RegressionDataset {
  std::vector<Dyad> dyads;
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::string> columns;
  std::map<std::string, std::string> metadata;

  std::size_t rows() const noexcept { return dyads.size(); }
  std::size_t column_index(const std::string& name) const;
  // Columns in the given order.
  Eigen::MatrixXd select(const std::vector<std::string>& names) const;
};

// One row per ordered eligible dyad (i, j), i != j, sorted by (i, j).
RegressionDataset build_design_matrix(const FlowNetwork& outcome, const FlowNetwork& lag,
                                      const MassVector& lag_mass, const ProximitySet& proximities,
                                      const std::set<InstitutionId>& eligible,
                                      const TransformGuards& guards = {});

void write_design_matrix(std::ostream& out, const RegressionDataset& data);
RegressionDataset read_design_matrix(std::istream& in);

}  // namespace rlflow
