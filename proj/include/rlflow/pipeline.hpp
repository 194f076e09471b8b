#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rlflow/config.hpp"
#include "rlflow/corpus.hpp"
#include "rlflow/diagnostics.hpp"
#include "rlflow/models.hpp"
#include "rlflow/proximity.hpp"

namespace rlflow {

// Regressor sets of the nested gravity ladder, Model 1 to Model 5.
const std::vector<std::vector<std::string>>& gravity_ladder();

struct LoadedCorpus {
  Corpus corpus;
  std::size_t papers_read = 0;
  std::size_t dropped = 0;
  std::vector<Reject> rejects;
};

LoadedCorpus load_corpus(const RunConfig& config);

struct ValidateReport {
  std::size_t papers = 0;
  std::size_t institutions = 0;
  std::size_t dropped = 0;
  std::vector<Reject> rejects;
  std::vector<std::pair<ErrorCode, std::string>> errors;
  bool strict = true;

  bool clean() const { return errors.empty() && (!strict || rejects.empty()); }
};

ValidateReport run_validate(const RunConfig& config);
void write_validate_report(std::ostream& out, const ValidateReport& report);

// Institution topic vectors from an LDA fit on the lag-period slice; zero
// vectors are left out.
std::map<InstitutionId, Eigen::VectorXd> lag_topic_vectors(const Corpus& corpus, const RunConfig& config);

// Dyad design for one (outcome, lag) window. Eligible institutions lead a
// multi-institution paper every outcome year, have positive lag mass and a
// non-zero topic vector.
RegressionDataset build_dataset(const Corpus& corpus, const RunConfig& config, const Period& outcome,
                                const Period& lag, const std::map<InstitutionId, Eigen::VectorXd>& vectors,
                                Counting counting);

struct FitResults {
  RegressionDataset data;
  DescriptiveStats descriptive;
  std::vector<VifRow> vifs;
  std::vector<ModelFit> ladder;
  std::vector<RegressionDataset> sub_data;
  std::vector<ModelFit> sub_fits;  // a, b, pooled
  std::optional<TestResult> chow;
  std::optional<RegressionDataset> count_data;
  std::optional<ModelFit> nb2, zinb;
  std::optional<TestResult> vuong;
  std::vector<std::pair<std::string, ModelFit>> field_fits;
  std::vector<std::pair<InstitutionId, double>> disparity;
  std::optional<KdeCurve> disparity_kde;
  std::string kde_note;
};

FitResults fit_pipeline(const Corpus& corpus, const RunConfig& config);

struct RunSummary {
  std::vector<std::filesystem::path> files;
  std::vector<std::pair<std::string, std::string>> facts;
};

void write_summary(std::ostream& out, const RunSummary& summary);

RunSummary run_network(const RunConfig& config);
RunSummary run_topics(const RunConfig& config);
RunSummary run_fit(const RunConfig& config);
RunSummary run_synth(const RunConfig& config);

}  // namespace rlflow
