#include "rlflow/proximity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rlflow/csv.hpp"

namespace rlflow {

namespace {

void check_coordinates(double lat, double lon) {
  if (!(lat >= -90.0 && lat <= 90.0) || !(lon >= -180.0 && lon <= 180.0))
    throw Error(ErrorCode::CoordinateOutOfRange,
                "(" + csv::format_double(lat) + ", " + csv::format_double(lon) + ")");
}

const InstitutionRecord& lookup(const Registry& registry, const InstitutionId& id) {
  auto it = registry.find(id);
  if (it == registry.end()) throw Error(ErrorCode::UnknownInstitution, id);
  return it->second;
}

}  // namespace

double geo_distance(double lat1, double lon1, double lat2, double lon2) {
  check_coordinates(lat1, lon1);
  check_coordinates(lat2, lon2);
  constexpr double rad = std::numbers::pi / 180.0;
  const double phi1 = lat1 * rad, phi2 = lat2 * rad;
  const double dphi = (lat2 - lat1) * rad, dlambda = (lon2 - lon1) * rad;
  const double s1 = std::sin(dphi / 2.0), s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

double cognitive_proximity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "vector dimensions differ");
  const double na = a.norm(), nb = b.norm();
  if (!(na > 0.0)) throw Error(ErrorCode::ZeroVector, "first vector");
  if (!(nb > 0.0)) throw Error(ErrorCode::ZeroVector, "second vector");
  return std::clamp(a.dot(b) / (na * nb), 0.0, 1.0);
}

int institutional_proximity(const Registry& registry, const InstitutionId& i, const InstitutionId& j) {
  return lookup(registry, i).province == lookup(registry, j).province ? 1 : 0;
}

int social_proximity(const FlowNetwork& prior, const InstitutionId& i, const InstitutionId& j) {
  if (i == j) return 0;
  return (prior.weight(i, j) > 0.0 || prior.weight(j, i) > 0.0) ? 1 : 0;
}

long long economic_proximity(const Registry& registry, const InstitutionId& i, const InstitutionId& j,
                             const Period& period) {
  auto ci = lookup(registry, i).nsfc(period);
  if (!ci) throw Error(ErrorCode::MissingNsfcCount, i + " for " + period.label());
  auto cj = lookup(registry, j).nsfc(period);
  if (!cj) throw Error(ErrorCode::MissingNsfcCount, j + " for " + period.label());
  return *ci > *cj ? *ci - *cj : *cj - *ci;
}

const DyadProximity& ProximitySet::at(const InstitutionId& i, const InstitutionId& j) const {
  auto it = values_.find({i, j});
  if (it == values_.end()) throw Error(ErrorCode::InvalidArgument, "no proximities for " + i + "->" + j);
  return it->second;
}

ProximitySet compute_proximity_set(const Registry& registry,
                                   const std::map<InstitutionId, Eigen::VectorXd>& vectors,
                                   const FlowNetwork& prior_network, const Period& econ_period,
                                   const std::set<InstitutionId>& institutions) {
  ProximitySet out;
  std::vector<InstitutionId> ids(institutions.begin(), institutions.end());
  for (std::size_t a = 0; a < ids.size(); ++a) {
    const auto& ri = lookup(registry, ids[a]);
    auto vi = vectors.find(ids[a]);
    if (vi == vectors.end()) throw Error(ErrorCode::ZeroVector, ids[a]);
    for (std::size_t b = a + 1; b < ids.size(); ++b) {
      const auto& rj = lookup(registry, ids[b]);
      auto vj = vectors.find(ids[b]);
      if (vj == vectors.end()) throw Error(ErrorCode::ZeroVector, ids[b]);
      DyadProximity p;
      p.geo_km = geo_distance(ri.latitude, ri.longitude, rj.latitude, rj.longitude);
      try {
        p.cogn = cognitive_proximity(vi->second, vj->second);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroVector) throw;
        throw Error(ErrorCode::ZeroVector, vi->second.norm() > 0.0 ? ids[b] : ids[a]);
      }
      p.inst = institutional_proximity(registry, ids[a], ids[b]);
      p.soc = social_proximity(prior_network, ids[a], ids[b]);
      p.econ_gap = economic_proximity(registry, ids[a], ids[b], econ_period);
      out.set(ids[a], ids[b], p);
      out.set(ids[b], ids[a], p);
    }
  }
  return out;
}

std::size_t RegressionDataset::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error(ErrorCode::InvalidArgument, "no column " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

Eigen::MatrixXd RegressionDataset::select(const std::vector<std::string>& names) const {
  Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t c = 0; c < names.size(); ++c)
    out.col(static_cast<Eigen::Index>(c)) = X.col(static_cast<Eigen::Index>(column_index(names[c])));
  return out;
}

RegressionDataset build_design_matrix(const FlowNetwork& outcome, const FlowNetwork& lag,
                                      const MassVector& lag_mass, const ProximitySet& proximities,
                                      const std::set<InstitutionId>& eligible,
                                      const TransformGuards& guards) {
  if (outcome.counting() != lag.counting())
    throw Error(ErrorCode::InvalidArgument, "outcome and lag networks use different counting");
  RegressionDataset data;
  data.columns = kDesignColumns;
  const auto n = eligible.size();
  const auto rows = static_cast<Eigen::Index>(n * (n > 0 ? n - 1 : 0));
  data.y.resize(rows);
  data.X.resize(rows, static_cast<Eigen::Index>(kDesignColumns.size()));
  data.dyads.reserve(static_cast<std::size_t>(rows));

  auto mass_of = [&](const InstitutionId& id) {
    auto it = lag_mass.find(id);
    return it == lag_mass.end() ? 0.0 : it->second;
  };

  Eigen::Index r = 0;
  for (const auto& i : eligible) {
    const double ln_lmi = std::log(mass_of(i));
    for (const auto& j : eligible) {
      if (i == j) continue;
      const auto& p = proximities.at(i, j);
      data.dyads.emplace_back(i, j);
      data.y(r) = outcome.weight(i, j);
      data.X(r, 0) = 1.0;
      data.X(r, 1) = ln_lmi;
      data.X(r, 2) = std::log(mass_of(j));
      data.X(r, 3) = std::log(std::max(p.geo_km, guards.geo_floor_km));
      data.X(r, 4) = std::log(std::max(p.cogn, guards.cogn_floor));
      data.X(r, 5) = p.inst;
      data.X(r, 6) = p.soc;
      data.X(r, 7) = std::log1p(static_cast<double>(p.econ_gap));
      for (Eigen::Index c = 0; c < data.X.cols(); ++c)
        if (!std::isfinite(data.X(r, c)))
          throw Error(ErrorCode::NonFiniteRegressor,
                      i + "->" + j + " column " + kDesignColumns[static_cast<std::size_t>(c)]);
      if (!std::isfinite(data.y(r))) throw Error(ErrorCode::NonFiniteRegressor, i + "->" + j + " column y");
      ++r;
    }
  }
  data.metadata["outcome_period"] = outcome.period().label();
  data.metadata["lag_period"] = lag.period().label();
  data.metadata["counting"] = to_string(outcome.counting());
  data.metadata["geo_floor_km"] = csv::format_double(guards.geo_floor_km);
  data.metadata["cogn_floor"] = csv::format_double(guards.cogn_floor);
  data.metadata["econ_transform"] = "log1p";
  return data;
}

void write_design_matrix(std::ostream& out, const RegressionDataset& data) {
  csv::Row header = {"i", "j", "y"};
  header.insert(header.end(), data.columns.begin(), data.columns.end());
  csv::write_row(out, header);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    csv::Row row = {data.dyads[r].first, data.dyads[r].second, csv::format_double(data.y(ri))};
    for (Eigen::Index c = 0; c < data.X.cols(); ++c) row.push_back(csv::format_double(data.X(ri, c)));
    csv::write_row(out, row);
  }
}

RegressionDataset read_design_matrix(std::istream& in) {
  csv::Reader reader(in);
  csv::Row header;
  if (!reader.next(header)) throw ParseError(1, "empty design matrix");
  if (header.size() < 4 || header[0] != "i" || header[1] != "j" || header[2] != "y")
    throw ParseError(1, "header must start with i,j,y");
  RegressionDataset data;
  data.columns.assign(header.begin() + 3, header.end());
  std::vector<std::vector<double>> rows;
  std::vector<double> ys;
  csv::Row row;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != header.size()) throw ParseError(reader.line_no(), "field count");
    data.dyads.emplace_back(row[0], row[1]);
    try {
      ys.push_back(csv::parse_double(row[2]));
      std::vector<double> x;
      for (std::size_t c = 3; c < row.size(); ++c) x.push_back(csv::parse_double(row[c]));
      rows.push_back(std::move(x));
    } catch (const Error& e) {
      throw ParseError(reader.line_no(), e.detail());
    }
  }
  data.y = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  data.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(data.columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < data.columns.size(); ++c)
      data.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return data;
}

}  // namespace rlflow
