#include "rlflow/topicmodel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rlflow/csv.hpp"

namespace rlflow {

Vocabulary::Vocabulary(std::vector<std::string> words) {
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  words_ = std::move(words);
  for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
}

std::optional<std::size_t> Vocabulary::find(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

GibbsSampler::GibbsSampler(std::vector<Document> docs, std::size_t vocab_size, std::size_t topics,
                           double alpha, double beta, std::uint64_t seed)
    : docs_(std::move(docs)),
      topics_(topics),
      vocab_(vocab_size),
      alpha_(alpha),
      beta_(beta),
      rng_(seed),
      weights_(topics) {
  const auto d_count = static_cast<Eigen::Index>(docs_.size());
  doc_counts_ = Eigen::MatrixXi::Zero(d_count, static_cast<Eigen::Index>(topics));
  word_counts_ = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(topics), static_cast<Eigen::Index>(vocab_size));
  topic_counts_ = Eigen::VectorXi::Zero(static_cast<Eigen::Index>(topics));
  z_.resize(docs_.size());
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    z_[d].resize(docs_[d].size());
    for (std::size_t n = 0; n < docs_[d].size(); ++n) {
      const auto w = docs_[d][n];
      if (w >= vocab_) throw Error(ErrorCode::InvalidArgument, "word index out of range");
      const int k = static_cast<int>(rng_.below(topics));
      z_[d][n] = k;
      ++doc_counts_(static_cast<Eigen::Index>(d), k);
      ++word_counts_(k, static_cast<Eigen::Index>(w));
      ++topic_counts_(k);
      ++tokens_;
    }
  }
}

void GibbsSampler::sweep() {
  const double vbeta = static_cast<double>(vocab_) * beta_;
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    const auto di = static_cast<Eigen::Index>(d);
    for (std::size_t n = 0; n < docs_[d].size(); ++n) {
      const auto w = static_cast<Eigen::Index>(docs_[d][n]);
      int k = z_[d][n];
      --doc_counts_(di, k);
      --word_counts_(k, w);
      --topic_counts_(k);

      double total = 0.0;
      for (std::size_t t = 0; t < topics_; ++t) {
        const auto ti = static_cast<Eigen::Index>(t);
        total += (doc_counts_(di, ti) + alpha_) * (word_counts_(ti, w) + beta_) /
                 (topic_counts_(ti) + vbeta);
        weights_[t] = total;
      }
      const double u = rng_.uniform() * total;
      k = static_cast<int>(std::upper_bound(weights_.begin(), weights_.end(), u) - weights_.begin());
      if (k >= static_cast<int>(topics_)) k = static_cast<int>(topics_) - 1;

      z_[d][n] = k;
      ++doc_counts_(di, k);
      ++word_counts_(k, w);
      ++topic_counts_(k);
    }
  }
}

Eigen::MatrixXd GibbsSampler::topic_word() const {
  Eigen::MatrixXd phi = word_counts_.cast<double>().array() + beta_;
  const double vbeta = static_cast<double>(vocab_) * beta_;
  for (Eigen::Index k = 0; k < phi.rows(); ++k) phi.row(k) /= topic_counts_(k) + vbeta;
  return phi;
}

Eigen::MatrixXd GibbsSampler::doc_topic() const {
  Eigen::MatrixXd theta = doc_counts_.cast<double>().array() + alpha_;
  const double kalpha = static_cast<double>(topics_) * alpha_;
  for (Eigen::Index d = 0; d < theta.rows(); ++d)
    theta.row(d) /= static_cast<double>(docs_[static_cast<std::size_t>(d)].size()) + kalpha;
  return theta;
}

long long GibbsSampler::assigned_count() const { return topic_counts_.cast<long long>().sum(); }

std::optional<std::size_t> TopicModel::doc_row(const std::string& paper_id) const {
  auto it = std::lower_bound(doc_ids.begin(), doc_ids.end(), paper_id);
  if (it == doc_ids.end() || *it != paper_id) return std::nullopt;
  return static_cast<std::size_t>(it - doc_ids.begin());
}

TopicModel fit_lda(const std::vector<std::string>& doc_ids,
                   const std::vector<std::vector<std::string>>& docs, const LdaSettings& settings) {
  if (settings.topics < 2) throw Error(ErrorCode::InvalidHyperparameter, "topic count must be >= 2");
  const double alpha = settings.resolved_alpha();
  if (!(alpha > 0.0) || !(settings.beta > 0.0))
    throw Error(ErrorCode::InvalidHyperparameter, "alpha and beta must be positive");
  if (settings.burn_in < 0 || settings.iterations <= settings.burn_in || settings.thin < 1)
    throw Error(ErrorCode::InvalidHyperparameter, "need iterations > burn_in >= 0 and thin >= 1");
  if (doc_ids.size() != docs.size()) throw Error(ErrorCode::InvalidArgument, "doc id count mismatch");
  if (!std::is_sorted(doc_ids.begin(), doc_ids.end()))
    throw Error(ErrorCode::InvalidArgument, "doc ids must be sorted");

  TopicModel model;
  std::vector<std::string> words;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (docs[d].empty()) continue;
    model.doc_ids.push_back(doc_ids[d]);
    words.insert(words.end(), docs[d].begin(), docs[d].end());
  }
  if (words.empty()) throw Error(ErrorCode::EmptyCorpus, "no keyword tokens");
  model.vocabulary = Vocabulary(std::move(words));

  std::vector<Document> encoded;
  for (const auto& doc : docs) {
    if (doc.empty()) continue;
    Document e;
    e.reserve(doc.size());
    for (const auto& w : doc) e.push_back(*model.vocabulary.find(w));
    encoded.push_back(std::move(e));
  }

  GibbsSampler sampler(std::move(encoded), model.vocabulary.size(), settings.topics, alpha,
                       settings.beta, settings.seed);
  const auto k = static_cast<Eigen::Index>(settings.topics);
  Eigen::MatrixXd phi_sum = Eigen::MatrixXd::Zero(k, static_cast<Eigen::Index>(model.vocabulary.size()));
  Eigen::MatrixXd theta_sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(model.doc_ids.size()), k);
  int samples = 0;
  for (int it = 1; it <= settings.iterations; ++it) {
    sampler.sweep();
    if (it > settings.burn_in && (it - settings.burn_in) % settings.thin == 0) {
      phi_sum += sampler.topic_word();
      theta_sum += sampler.doc_topic();
      ++samples;
    }
  }
  if (samples == 0) {
    phi_sum = sampler.topic_word();
    theta_sum = sampler.doc_topic();
    samples = 1;
  } else {
    phi_sum /= samples;
    theta_sum /= samples;
  }
  // Renormalize away accumulated rounding.
  for (Eigen::Index r = 0; r < phi_sum.rows(); ++r) phi_sum.row(r) /= phi_sum.row(r).sum();
  for (Eigen::Index r = 0; r < theta_sum.rows(); ++r) theta_sum.row(r) /= theta_sum.row(r).sum();

  model.topics = settings.topics;
  model.topic_word = std::move(phi_sum);
  model.doc_topic = std::move(theta_sum);
  model.alpha = alpha;
  model.beta = settings.beta;
  model.seed = settings.seed;
  model.iterations = settings.iterations;
  model.burn_in = settings.burn_in;
  model.thin = settings.thin;
  model.samples = samples;
  return model;
}

TopicModel fit_lda(const Corpus& slice, const LdaSettings& settings) {
  std::vector<std::string> ids;
  std::vector<std::vector<std::string>> docs;
  for (const auto& p : slice.papers()) {
    ids.push_back(p.paper_id);
    docs.push_back(p.keywords);
  }
  return fit_lda(ids, docs, settings);
}

std::vector<InstitutionVector> institution_vectors(const Corpus& slice, const TopicModel& model) {
  const auto k = static_cast<Eigen::Index>(model.topics);
  std::map<InstitutionId, InstitutionVector> acc;
  for (const auto& [id, _] : slice.registry()) acc[id] = {id, Eigen::VectorXd::Zero(k), true};
  for (const auto& p : slice.papers()) {
    auto row = model.doc_row(p.paper_id);
    if (!row) continue;
    for (const auto& a : p.affiliations) {
      auto& v = acc[a.institution_id];
      if (v.weights.size() == 0) v = {a.institution_id, Eigen::VectorXd::Zero(k), true};
      v.weights += model.doc_topic.row(static_cast<Eigen::Index>(*row)).transpose();
      v.zero = false;
    }
  }
  std::vector<InstitutionVector> out;
  out.reserve(acc.size());
  for (auto& [_, v] : acc) out.push_back(std::move(v));
  return out;
}

double perplexity(const Eigen::MatrixXd& topic_word, const Eigen::MatrixXd& doc_topic,
                  const std::vector<Document>& docs) {
  double loglik = 0.0;
  std::size_t tokens = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (auto w : docs[d]) {
      double p = doc_topic.row(static_cast<Eigen::Index>(d)).dot(topic_word.col(static_cast<Eigen::Index>(w)));
      loglik += std::log(p);
      ++tokens;
    }
  }
  if (tokens == 0) throw Error(ErrorCode::EmptyCorpus, "no tokens for perplexity");
  return std::exp(-loglik / static_cast<double>(tokens));
}

double perplexity(const TopicModel& model, const Corpus& slice) {
  std::vector<Document> docs(model.doc_ids.size());
  for (const auto& p : slice.papers()) {
    auto row = model.doc_row(p.paper_id);
    if (!row) continue;
    for (const auto& w : p.keywords)
      if (auto idx = model.vocabulary.find(w)) docs[*row].push_back(*idx);
  }
  return perplexity(model.topic_word, model.doc_topic, docs);
}

void write_topic_word(std::ostream& out, const TopicModel& model) {
  csv::Row header = {"topic"};
  for (const auto& w : model.vocabulary.words()) header.push_back(w);
  csv::write_row(out, header);
  for (Eigen::Index k = 0; k < model.topic_word.rows(); ++k) {
    csv::Row row = {std::to_string(k)};
    for (Eigen::Index v = 0; v < model.topic_word.cols(); ++v)
      row.push_back(csv::format_double(model.topic_word(k, v)));
    csv::write_row(out, row);
  }
}

void write_doc_topic(std::ostream& out, const TopicModel& model) {
  csv::Row header = {"paper_id"};
  for (std::size_t k = 0; k < model.topics; ++k) header.push_back("topic_" + std::to_string(k));
  csv::write_row(out, header);
  for (Eigen::Index d = 0; d < model.doc_topic.rows(); ++d) {
    csv::Row row = {model.doc_ids[static_cast<std::size_t>(d)]};
    for (Eigen::Index k = 0; k < model.doc_topic.cols(); ++k)
      row.push_back(csv::format_double(model.doc_topic(d, k)));
    csv::write_row(out, row);
  }
}

}  // namespace rlflow
