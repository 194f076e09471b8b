#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rlflow/corpus.hpp"
#include "rlflow/random.hpp"

namespace rlflow {

// Sorted, de-duplicated keyword list.
class Vocabulary {
public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> words);

  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::string& word(std::size_t i) const { return words_.at(i); }
  std::optional<std::size_t> find(const std::string& word) const;

private:
  std::vector<std::string> words_;
  std::map<std::string, std::size_t> index_;
};

struct LdaSettings {
  std::size_t topics = 50;
  std::optional<double> alpha;  // defaults to 50 / topics
  double beta = 0.01;
  int iterations = 1000;
  int burn_in = 200;
  int thin = 10;
  std::uint64_t seed = 1;

  double resolved_alpha() const { return alpha ? *alpha : 50.0 / static_cast<double>(topics); }
};

using Document = std::vector<std::size_t>;  // word indices

// Collapsed Gibbs sampler state (token topic assignments + count tables).
class GibbsSampler {
public:
  GibbsSampler(std::vector<Document> docs, std::size_t vocab_size, std::size_t topics, double alpha,
               double beta, std::uint64_t seed);

  void sweep();

  // Smoothed point estimates from the current assignment.
  Eigen::MatrixXd topic_word() const;
  Eigen::MatrixXd doc_topic() const;

  std::size_t token_count() const noexcept { return tokens_; }
  long long assigned_count() const;  // sum of the topic totals
  const std::vector<Document>& documents() const noexcept { return docs_; }

private:
  std::vector<Document> docs_;
  std::vector<std::vector<int>> z_;
  Eigen::MatrixXi doc_counts_;   // D x K
  Eigen::MatrixXi word_counts_;  // K x V
  Eigen::VectorXi topic_counts_;
  std::size_t topics_, vocab_, tokens_ = 0;
  double alpha_, beta_;
  Rng rng_;
  std::vector<double> weights_;
};

struct TopicModel {
  std::size_t topics = 0;
  Vocabulary vocabulary;
  Eigen::MatrixXd topic_word;  // K x V, rows sum to 1
  Eigen::MatrixXd doc_topic;   // D x K, rows sum to 1
  std::vector<std::string> doc_ids;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  int iterations = 0;
  int burn_in = 0;
  int thin = 0;
  int samples = 0;  // sweeps averaged into the estimates

  std::optional<std::size_t> doc_row(const std::string& paper_id) const;
};

// Documents are the keyword bags of papers with at least one keyword.
TopicModel fit_lda(const Corpus& slice, const LdaSettings& settings);
TopicModel fit_lda(const std::vector<std::string>& doc_ids, const std::vector<std::vector<std::string>>& docs,
                   const LdaSettings& settings);

struct InstitutionVector {
  InstitutionId institution_id;
  Eigen::VectorXd weights;
  bool zero = true;
};

// Sum of doc_topic rows over the institution's papers. Every registry
// institution gets an entry; those without keyword-bearing papers are zero.
std::vector<InstitutionVector> institution_vectors(const Corpus& slice, const TopicModel& model);

double perplexity(const Eigen::MatrixXd& topic_word, const Eigen::MatrixXd& doc_topic,
                  const std::vector<Document>& docs);
double perplexity(const TopicModel& model, const Corpus& slice);

void write_topic_word(std::ostream& out, const TopicModel& model);
void write_doc_topic(std::ostream& out, const TopicModel& model);

}  // namespace rlflow
