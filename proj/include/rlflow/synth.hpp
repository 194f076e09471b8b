#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rlflow/corpus.hpp"

namespace rlflow {

using Coefficients = std::vector<std::pair<std::string, double>>;

// Participant-choice utility of the corpus generator. Signs match the
// expected gravity-model signs.
struct CorpusUtility {
  double mass = 1.0;      // ln latent mass of the participant
  double geo = -0.8;      // ln distance in km
  double cogn = 3.0;      // cosine of topic preferences
  double inst = 0.8;      // same province
  double soc = 1.2;       // collaborated before
  double econ = 0.05;     // ln(1 + |nsfc gap|)
};

Coefficients default_tobit_beta();
// Residual SD that puts the default design at roughly 78% censoring.
inline constexpr double kDefaultTobitSigma = 28.0;

struct DgpConfig {
  std::uint64_t seed = 1;

  // Tabular generators.
  std::size_t rows = 59292;
  Coefficients beta = default_tobit_beta();
  double sigma = kDefaultTobitSigma;
  // When set, the intercept is recalibrated so the expected censoring share
  // over the drawn design equals the target.
  std::optional<double> censoring_target;
  // (mean, sd) overrides for named regressors; drawn independently normal.
  std::map<std::string, std::pair<double, double>> moments;

  Coefficients count_beta = {{"const", 0.5}, {"x1", 0.7}, {"x2", -0.4}};
  Coefficients inflate_gamma = {{"const", -0.5}, {"z1", 1.0}};
  double alpha = 0.5;

  // Corpus generator.
  std::size_t institutions = 60;
  std::size_t provinces = 10;
  std::size_t papers_per_year = 400;
  Period lag_period{2008, 2012};
  Period outcome_period{2013, 2017};
  // Extra registry NSFC periods (e.g. lag windows of sub-periods).
  std::vector<Period> nsfc_periods;
  std::size_t planted_topics = 5;
  std::size_t words_per_topic = 20;
  std::size_t keywords_per_paper = 6;
  std::size_t fields = 3;
  double mass_log_sd = 0.7;
  double single_institution_share = 0.1;
  double co_leader_share = 0.1;
  double extra_participants_mean = 0.6;
  CorpusUtility utility;

  // Throws InvalidArgument.
  void validate() const;
};

struct TobitDataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::string> names;
  Eigen::VectorXd beta;  // true coefficients, after any intercept calibration
  double sigma = 0.0;
  double censoring_share = 0.0;
};

// Columns named like the dyad design (ln_LM_i, ln_geo, inst, ...) follow
// the moments and correlations of typical dyad data; other names are
// standard normal unless overridden in `moments`; "const" is a column of ones.
TobitDataset gen_tobit_dataset(const DgpConfig& config);

enum class CountKind { Poisson, NegBin, Zinb };
CountKind parse_count_kind(std::string_view text);

struct CountDataset {
  CountKind kind = CountKind::Poisson;
  Eigen::VectorXd y;
  Eigen::MatrixXd X, X_inflate;
  std::vector<std::string> names, inflate_names;
  Eigen::VectorXd beta, gamma;
  double alpha = 0.0;
};

// Regressors are standard normal; an inflation regressor sharing a name with
// a count regressor reuses that column.
CountDataset gen_count_dataset(const DgpConfig& config, CountKind kind);

// Institutions, registry and papers over lag_period..outcome_period.
Corpus gen_corpus(const DgpConfig& config);

}  // namespace rlflow
