#include "rlflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/students_t.hpp>

#include "rlflow/csv.hpp"
#include "rlflow/error.hpp"
#include "rlflow/models.hpp"

namespace rlflow {

namespace {

bool is_constant(const Eigen::VectorXd& v) {
  return v.size() == 0 || (v.array() == v(0)).all();
}

// Hyndman-Fan type 7.
double quantile(std::vector<double> sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<VifRow> vif(const Eigen::MatrixXd& X, const std::vector<std::string>& names) {
  if (static_cast<Eigen::Index>(names.size()) != X.cols())
    throw Error(ErrorCode::InvalidArgument, "name count does not match column count");
  std::vector<Eigen::Index> scored;
  for (Eigen::Index c = 0; c < X.cols(); ++c)
    if (!is_constant(X.col(c))) scored.push_back(c);

  const Eigen::Index n = X.rows();
  Eigen::MatrixXd centered(n, static_cast<Eigen::Index>(scored.size()));
  for (std::size_t k = 0; k < scored.size(); ++k) {
    const auto col = X.col(scored[k]);
    centered.col(static_cast<Eigen::Index>(k)) = col.array() - col.mean();
  }
  // Exact dependence check on unit-norm columns.
  Eigen::MatrixXd unit = centered;
  for (Eigen::Index c = 0; c < unit.cols(); ++c) unit.col(c) /= unit.col(c).norm();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> full(unit);
  full.setThreshold(1e-12);
  if (full.rank() < unit.cols()) {
    for (Eigen::Index c = 1; c <= unit.cols(); ++c) {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> part(unit.leftCols(c));
      part.setThreshold(1e-12);
      if (part.rank() < c) throw Error(ErrorCode::RankDeficient, names[static_cast<std::size_t>(scored[static_cast<std::size_t>(c - 1)])]);
    }
  }

  std::vector<VifRow> out;
  for (std::size_t k = 0; k < scored.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const Eigen::VectorXd target = unit.col(kk);
    double value = 1.0;
    if (unit.cols() > 1) {
      Eigen::MatrixXd others(n, unit.cols() - 1);
      for (Eigen::Index c = 0, o = 0; c < unit.cols(); ++c)
        if (c != kk) others.col(o++) = unit.col(c);
      // Columns are centred, so the constant is already partialled out.
      Eigen::VectorXd b = others.colPivHouseholderQr().solve(target);
      const double rss = (target - others * b).squaredNorm();
      value = 1.0 / rss;  // target has unit norm, so TSS = 1
    }
    out.push_back({names[static_cast<std::size_t>(scored[k])], value});
  }
  return out;
}

DescriptiveStats descriptive_stats(const Eigen::MatrixXd& data, const std::vector<std::string>& names) {
  if (data.rows() == 0) throw Error(ErrorCode::InvalidArgument, "empty dataset");
  if (static_cast<Eigen::Index>(names.size()) != data.cols())
    throw Error(ErrorCode::InvalidArgument, "name count does not match column count");
  DescriptiveStats s;
  s.columns = names;
  s.n = static_cast<std::size_t>(data.rows());
  const auto n = static_cast<double>(data.rows());
  const auto p = static_cast<std::size_t>(data.cols());
  Eigen::MatrixXd centered = data;
  for (std::size_t c = 0; c < p; ++c) {
    const auto cc = static_cast<Eigen::Index>(c);
    const double mean = data.col(cc).mean();
    centered.col(cc).array() -= mean;
    s.mean.push_back(mean);
    s.sd.push_back(data.rows() > 1 ? std::sqrt(centered.col(cc).squaredNorm() / (n - 1.0)) : 0.0);
  }
  s.r.assign(p, std::vector<std::optional<double>>(p));
  s.p.assign(p, std::vector<std::optional<double>>(p));
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      const auto ca = centered.col(static_cast<Eigen::Index>(a));
      const auto cb = centered.col(static_cast<Eigen::Index>(b));
      const double denom = std::sqrt(ca.squaredNorm() * cb.squaredNorm());
      if (is_constant(data.col(static_cast<Eigen::Index>(a))) || is_constant(data.col(static_cast<Eigen::Index>(b))))
        continue;
      double r = a == b ? 1.0 : std::clamp(ca.dot(cb) / denom, -1.0, 1.0);
      double pv = 0.0;
      if (std::abs(r) < 1.0 && n > 2.0) {
        const double t = r * std::sqrt((n - 2.0) / (1.0 - r * r));
        boost::math::students_t dist(n - 2.0);
        pv = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
      } else if (n <= 2.0) {
        pv = 1.0;
      }
      s.r[a][b] = s.r[b][a] = r;
      s.p[a][b] = s.p[b][a] = pv;
    }
  }
  return s;
}

void write_descriptive_table(std::ostream& out, const DescriptiveStats& stats,
                             const std::vector<VifRow>& vifs) {
  csv::Row header = {"variable", "mean", "sd", "vif"};
  for (std::size_t c = 0; c < stats.columns.size(); ++c) header.push_back(std::to_string(c + 1));
  csv::write_row(out, header);
  for (std::size_t a = 0; a < stats.columns.size(); ++a) {
    std::string v = "-";
    for (const auto& row : vifs)
      if (row.column == stats.columns[a]) v = csv::format_double(row.vif);
    csv::Row row = {stats.columns[a], csv::format_double(stats.mean[a]), csv::format_double(stats.sd[a]), v};
    for (std::size_t b = 0; b < stats.columns.size(); ++b) {
      if (b > a) {
        row.emplace_back();
      } else if (!stats.r[a][b]) {
        row.emplace_back("undefined");
      } else {
        row.push_back(csv::format_double(*stats.r[a][b]) + (a == b ? "" : significance_stars(*stats.p[a][b])));
      }
    }
    csv::write_row(out, row);
  }
}

double silverman_bandwidth(const std::vector<double>& values) {
  if (values.size() < 2) throw Error(ErrorCode::DegenerateSample, "need at least two values");
  const auto n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) throw Error(ErrorCode::DegenerateSample, "zero spread");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(n, -0.2);
}

double kde_density(const std::vector<double>& values, double bandwidth, double x) {
  double sum = 0.0;
  for (double v : values) {
    const double u = (x - v) / bandwidth;
    sum += std::exp(-0.5 * u * u);
  }
  return sum / (static_cast<double>(values.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
}

KdeCurve kde(const std::vector<double>& values, std::optional<double> bandwidth, std::size_t grid_points) {
  if (values.empty()) throw Error(ErrorCode::DegenerateSample, "no values");
  if (grid_points < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least two points");
  for (double v : values)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite value");
  KdeCurve curve;
  if (bandwidth) {
    if (!(*bandwidth > 0.0) || !std::isfinite(*bandwidth))
      throw Error(ErrorCode::InvalidArgument, "bandwidth must be positive");
    curve.bandwidth = *bandwidth;
  } else {
    curve.bandwidth = silverman_bandwidth(values);
  }
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double lo = *mn - 3.0 * curve.bandwidth;
  const double hi = *mx + 3.0 * curve.bandwidth;
  curve.x.resize(grid_points);
  curve.density.resize(grid_points);
  const auto last = static_cast<double>(grid_points - 1);
  for (std::size_t k = 0; k < grid_points; ++k) {
    const double t = static_cast<double>(k) / last;
    curve.x[k] = k + 1 == grid_points ? hi : lo + (hi - lo) * t;
    curve.density[k] = kde_density(values, curve.bandwidth, curve.x[k]);
  }
  return curve;
}

double kde_integral(const KdeCurve& curve) {
  double total = 0.0;
  for (std::size_t k = 1; k < curve.x.size(); ++k)
    total += 0.5 * (curve.density[k] + curve.density[k - 1]) * (curve.x[k] - curve.x[k - 1]);
  return total;
}

void write_kde(std::ostream& out, const KdeCurve& curve) {
  csv::write_row(out, {"x", "density"});
  for (std::size_t k = 0; k < curve.x.size(); ++k)
    csv::write_row(out, {csv::format_double(curve.x[k]), csv::format_double(curve.density[k])});
}

}  // namespace rlflow
