#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rlflow {

struct VifRow {
  std::string column;
  double vif = 1.0;
};

// 1/(1 - R^2) of each non-constant column regressed on the others plus a
// constant. Constant columns are skipped. Throws RankDeficient for exact
// linear dependence; near-dependence yields a large VIF.
std::vector<VifRow> vif(const Eigen::MatrixXd& X, const std::vector<std::string>& names);

struct DescriptiveStats {
  std::vector<std::string> columns;
  std::vector<double> mean;
  std::vector<double> sd;  // n - 1 denominator
  // Pearson r and two-sided t-test p; empty when either column is constant.
  std::vector<std::vector<std::optional<double>>> r;
  std::vector<std::vector<std::optional<double>>> p;
  std::size_t n = 0;
};

DescriptiveStats descriptive_stats(const Eigen::MatrixXd& data, const std::vector<std::string>& names);

// Variable, mean, sd, VIF, then the lower triangle of starred correlations.
void write_descriptive_table(std::ostream& out, const DescriptiveStats& stats,
                             const std::vector<VifRow>& vifs);

struct KdeCurve {
  double bandwidth = 0.0;
  std::vector<double> x;
  std::vector<double> density;
};

inline constexpr std::size_t kKdeGridPoints = 512;

// 0.9 min(sd, IQR/1.34) n^(-1/5); falls back to sd when the IQR is zero.
// Throws DegenerateSample when fewer than two values or zero spread.
double silverman_bandwidth(const std::vector<double>& values);

// Gaussian-kernel density on a uniform grid over [min - 3h, max + 3h].
KdeCurve kde(const std::vector<double>& values, std::optional<double> bandwidth = std::nullopt,
             std::size_t grid_points = kKdeGridPoints);

double kde_density(const std::vector<double>& values, double bandwidth, double x);

// Trapezoidal integral of the curve over its grid.
double kde_integral(const KdeCurve& curve);

void write_kde(std::ostream& out, const KdeCurve& curve);

}  // namespace rlflow
