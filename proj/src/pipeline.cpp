#include "rlflow/pipeline.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "rlflow/csv.hpp"
#include "rlflow/error.hpp"
#include "rlflow/leadership.hpp"
#include "rlflow/report.hpp"
#include "rlflow/svg.hpp"
#include "rlflow/synth.hpp"
#include "rlflow/topicmodel.hpp"

namespace rlflow {

const std::vector<std::vector<std::string>>& gravity_ladder() {
  static const std::vector<std::vector<std::string>> ladder = [] {
    std::vector<std::vector<std::string>> out;
    std::vector<std::string> cols = {"const", "ln_LM_i", "ln_LM_j", "ln_geo"};
    out.push_back(cols);
    for (const char* extra : {"ln_cogn", "inst", "soc", "ln_econ"}) {
      cols.emplace_back(extra);
      out.push_back(cols);
    }
    return out;
  }();
  return ladder;
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

class OutputDir {
public:
  explicit OutputDir(const std::filesystem::path& dir) : dir_(dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& fill) {
    std::ostringstream out;
    fill(out);
    write_text(name, out.str());
  }

  void write_text(const std::string& name, const std::string& content) {
    csv::write_file_atomic(dir_ / name, content);
    summary.files.push_back(dir_ / name);
  }

  RunSummary summary;

private:
  std::filesystem::path dir_;
};

std::vector<Period> nsfc_needed(const RunConfig& config) {
  std::vector<Period> out = {config.lag_period};
  for (const auto& s : config.subperiods) out.push_back(s.lag);
  return out;
}

Eigen::MatrixXd stack(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

Eigen::VectorXd stack(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size() + b.size());
  out << a, b;
  return out;
}

FitOptions fit_options(const RunConfig& config) {
  FitOptions options;
  options.threads = config.threads;
  return options;
}

ModelFit fit_full_tobit(const RegressionDataset& data, const RunConfig& config) {
  const auto& cols = gravity_ladder().back();
  return fit_tobit(data.y, data.select(cols), cols, 0.0, fit_options(config));
}

}  // namespace

LoadedCorpus load_corpus(const RunConfig& config) {
  auto papers_in = open_input(config.papers);
  auto parsed = parse_papers(papers_in, config.mode);
  auto registry_in = open_input(config.registry);
  auto registry = parse_registry(registry_in);
  LoadedCorpus out;
  out.papers_read = parsed.papers.size() + parsed.rejects.size();
  auto assembled = assemble_corpus(std::move(parsed.papers), std::move(registry), config.mode);
  out.corpus = std::move(assembled.corpus);
  out.rejects = std::move(parsed.rejects);
  out.rejects.insert(out.rejects.end(), assembled.rejects.begin(), assembled.rejects.end());
  out.dropped = out.rejects.size();
  return out;
}

ValidateReport run_validate(const RunConfig& config) {
  ValidateReport report;
  report.strict = config.mode == IngestMode::Strict;
  try {
    auto loaded = load_corpus(config);
    report.papers = loaded.corpus.papers().size();
    report.institutions = loaded.corpus.registry().size();
    report.dropped = loaded.dropped;
    report.rejects = std::move(loaded.rejects);
    for (const auto& [id, inst] : loaded.corpus.registry())
      for (const auto& period : nsfc_needed(config))
        if (!inst.nsfc(period))
          report.errors.emplace_back(ErrorCode::MissingNsfcCount, id + ": no count for " + period.label());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Io) throw;
    report.errors.emplace_back(e.code(), e.what());
  }
  return report;
}

void write_validate_report(std::ostream& out, const ValidateReport& report) {
  csv::write_row(out, {"key", "value"});
  csv::write_row(out, {"status", report.clean() ? "clean" : "errors"});
  csv::write_row(out, {"papers", std::to_string(report.papers)});
  csv::write_row(out, {"institutions", std::to_string(report.institutions)});
  csv::write_row(out, {"dropped", std::to_string(report.dropped)});
  csv::write_row(out, {"errors", std::to_string(report.errors.size())});
  out << '\n';
  csv::write_row(out, {"kind", "code", "line", "paper_id", "message"});
  for (const auto& [code, message] : report.errors) csv::write_row(out, {"error", std::string(to_string(code)), "", "", message});
  for (const auto& r : report.rejects)
    csv::write_row(out, {"reject", std::string(to_string(r.code)), r.line_no ? std::to_string(r.line_no) : "", r.paper_id, r.reason});
}

std::map<InstitutionId, Eigen::VectorXd> lag_topic_vectors(const Corpus& corpus, const RunConfig& config) {
  const Corpus slice = filter_corpus(corpus, config.lag_period, config.field);
  const TopicModel model = fit_lda(slice, config.lda);
  std::map<InstitutionId, Eigen::VectorXd> out;
  for (auto& v : institution_vectors(slice, model))
    if (!v.zero) out.emplace(v.institution_id, std::move(v.weights));
  return out;
}

RegressionDataset build_dataset(const Corpus& corpus, const RunConfig& config, const Period& outcome,
                                const Period& lag, const std::map<InstitutionId, Eigen::VectorXd>& vectors,
                                Counting counting) {
  const FlowNetwork outcome_net = build_network(corpus, outcome, config.field, counting);
  const FlowNetwork lag_net = build_network(corpus, lag, config.field, counting);
  const MassVector lag_mass = leadership_mass(lag_net);
  std::set<InstitutionId> eligible;
  for (const auto& id : eligible_institutions(filter_corpus(corpus, outcome, config.field), outcome)) {
    auto m = lag_mass.find(id);
    if (m != lag_mass.end() && m->second > 0.0 && vectors.count(id)) eligible.insert(id);
  }
  if (eligible.size() < 3)
    throw Error(ErrorCode::DegenerateSample, "fewer than three eligible institutions for " + outcome.label());
  const ProximitySet prox = compute_proximity_set(corpus.registry(), vectors, lag_net, lag, eligible);
  RegressionDataset data = build_design_matrix(outcome_net, lag_net, lag_mass, prox, eligible, config.guards);
  data.metadata["outcome_period"] = outcome.label();
  data.metadata["lag_period"] = lag.label();
  data.metadata["counting"] = to_string(counting);
  return data;
}

FitResults fit_pipeline(const Corpus& corpus, const RunConfig& config) {
  config.validate();
  FitResults res;
  const auto vectors = lag_topic_vectors(corpus, config);
  res.data = build_dataset(corpus, config, config.outcome_period, config.lag_period, vectors, config.counting);

  std::vector<std::string> stat_names = {"C_ij"};
  const std::vector<std::string> regressors(kDesignColumns.begin() + 1, kDesignColumns.end());
  stat_names.insert(stat_names.end(), regressors.begin(), regressors.end());
  Eigen::MatrixXd stat_data(res.data.y.size(), static_cast<Eigen::Index>(stat_names.size()));
  stat_data << res.data.y, res.data.select(regressors);
  res.descriptive = descriptive_stats(stat_data, stat_names);
  res.vifs = vif(res.data.select(regressors), regressors);

  if (config.tobit) {
    for (const auto& cols : gravity_ladder())
      res.ladder.push_back(fit_tobit(res.data.y, res.data.select(cols), cols, 0.0, fit_options(config)));

    if (!config.subperiods.empty()) {
      for (const auto& s : config.subperiods)
        res.sub_data.push_back(build_dataset(corpus, config, s.outcome, s.lag, vectors, config.counting));
      const auto& cols = gravity_ladder().back();
      res.sub_fits.push_back(fit_full_tobit(res.sub_data[0], config));
      res.sub_fits.push_back(fit_full_tobit(res.sub_data[1], config));
      res.sub_fits.push_back(fit_tobit(stack(res.sub_data[0].y, res.sub_data[1].y),
                                       stack(res.sub_data[0].select(cols), res.sub_data[1].select(cols)), cols,
                                       0.0, fit_options(config)));
      res.chow = chow_test(res.sub_fits[2], res.sub_fits[0], res.sub_fits[1]);
    }

    for (const auto& field : config.field_runs) {
      RunConfig fc = config;
      fc.field = field;
      const auto fvec = lag_topic_vectors(corpus, fc);
      auto fdata = build_dataset(corpus, fc, fc.outcome_period, fc.lag_period, fvec, fc.counting);
      res.field_fits.emplace_back(field, fit_full_tobit(fdata, fc));
    }
  }

  if (config.zinb) {
    res.count_data = build_dataset(corpus, config, config.outcome_period, config.lag_period, vectors, Counting::Full);
    const auto& cols = gravity_ladder().back();
    const Eigen::MatrixXd X = res.count_data->select(cols);
    res.nb2 = fit_nb2(res.count_data->y, X, cols, fit_options(config));
    res.zinb = fit_zinb(res.count_data->y, X, X, cols, cols, fit_options(config));
    res.vuong = vuong_test(*res.zinb, *res.nb2, res.count_data->y, X, X);
  }

  const FlowNetwork outcome_net = build_network(corpus, config.outcome_period, config.field, config.counting);
  res.disparity = disparity_distribution(outcome_net).values;
  std::vector<double> values;
  for (const auto& [id, v] : res.disparity) values.push_back(v);
  try {
    res.disparity_kde = kde(values);
  } catch (const Error& e) {
    res.kde_note = e.what();
  }
  return res;
}

void write_summary(std::ostream& out, const RunSummary& summary) {
  for (const auto& [k, v] : summary.facts) out << k << ": " << v << '\n';
  for (const auto& f : summary.files) out << "wrote " << f.string() << '\n';
}

RunSummary run_network(const RunConfig& config) {
  auto loaded = load_corpus(config);
  const Corpus& corpus = loaded.corpus;
  OutputDir out(config.out_dir);
  for (const auto& [label, period] : {std::pair{"lag", config.lag_period}, std::pair{"outcome", config.outcome_period}}) {
    const FlowNetwork net = build_network(corpus, period, config.field, config.counting);
    const std::string suffix = std::string("_") + label + ".csv";
    out.write("edges" + suffix, [&](std::ostream& o) { write_edge_list(o, net); });
    out.write("mass_ranking" + suffix, [&](std::ostream& o) { write_mass_ranking(o, rank_by_mass(leadership_mass(net), config.top_k)); });
    out.write("top_dyads" + suffix, [&](std::ostream& o) { write_dyad_ranking(o, rank_dyads(net, config.top_k), corpus.registry()); });
    out.write("province_flows" + suffix, [&](std::ostream& o) { write_region_flows(o, aggregate_by_region(net, corpus.registry())); });
    out.write("disparity" + suffix, [&](std::ostream& o) {
      csv::write_row(o, {"institution_id", "disparity", "participants", "note"});
      for (const auto& id : net.institutions()) {
        auto d = disparity(net, id);
        csv::write_row(o, {id, d.value ? csv::format_double(*d.value) : "undefined", std::to_string(d.participants),
                           d.undefined_reason});
      }
    });
    out.summary.facts.emplace_back(std::string(label) + " papers", std::to_string(net.paper_count()));
    out.summary.facts.emplace_back(std::string(label) + " total flow", csv::format_double(net.total()));
  }
  return out.summary;
}

RunSummary run_topics(const RunConfig& config) {
  auto loaded = load_corpus(config);
  const Corpus slice = filter_corpus(loaded.corpus, config.lag_period, config.field);
  const TopicModel model = fit_lda(slice, config.lda);
  OutputDir out(config.out_dir);
  out.write("topic_word.csv", [&](std::ostream& o) { write_topic_word(o, model); });
  out.write("doc_topic.csv", [&](std::ostream& o) { write_doc_topic(o, model); });
  out.write("institution_topics.csv", [&](std::ostream& o) {
    csv::Row header = {"institution_id"};
    for (std::size_t k = 0; k < model.topics; ++k) header.push_back("topic_" + std::to_string(k));
    csv::write_row(o, header);
    for (const auto& v : institution_vectors(slice, model)) {
      if (v.zero) continue;
      csv::Row row = {v.institution_id};
      for (Eigen::Index k = 0; k < v.weights.size(); ++k) row.push_back(csv::format_double(v.weights(k)));
      csv::write_row(o, row);
    }
  });
  out.summary.facts.emplace_back("documents", std::to_string(model.doc_ids.size()));
  out.summary.facts.emplace_back("vocabulary", std::to_string(model.vocabulary.size()));
  out.summary.facts.emplace_back("perplexity", csv::format_double(perplexity(model, slice)));
  return out.summary;
}

RunSummary run_fit(const RunConfig& config) {
  auto loaded = load_corpus(config);
  const FitResults res = fit_pipeline(loaded.corpus, config);
  OutputDir out(config.out_dir);
  out.write("design_matrix.csv", [&](std::ostream& o) { write_design_matrix(o, res.data); });
  out.write("descriptive.csv", [&](std::ostream& o) { write_descriptive_table(o, res.descriptive, res.vifs); });
  out.summary.facts.emplace_back("dyads", std::to_string(res.data.rows()));

  if (!res.ladder.empty()) {
    std::vector<std::string> labels;
    for (std::size_t m = 0; m < res.ladder.size(); ++m) {
      labels.push_back("Model (" + std::to_string(m + 1) + ")");
      out.write("tobit_model" + std::to_string(m + 1) + ".csv", [&](std::ostream& o) { write_fit_report(o, res.ladder[m]); });
    }
    out.write("tobit_ladder.csv", [&](std::ostream& o) { write_model_table(o, labels, res.ladder); });

    // Effect of a one-SD change, so regressors on different scales share an axis.
    const ModelFit& full = res.ladder.back();
    std::vector<svg::Interval> rows;
    for (std::size_t k = 0; k < full.names.size(); ++k) {
      if (full.names[k] == "const") continue;
      const auto col = res.data.select({full.names[k]}).col(0);
      const double sd = std::sqrt((col.array() - col.mean()).square().sum() / static_cast<double>(col.size() - 1));
      const double b = full.beta(static_cast<Eigen::Index>(k)) * sd;
      const double h = 1.96 * full.beta_se(static_cast<Eigen::Index>(k)) * sd;
      rows.push_back({full.names[k], b, b - h, b + h});
    }
    out.write("coefficients_model5.csv", [&](std::ostream& o) {
      csv::write_row(o, {"variable", "effect_per_sd", "lo95", "hi95"});
      for (const auto& r : rows)
        csv::write_row(o, {r.label, csv::format_double(r.estimate), csv::format_double(r.lo), csv::format_double(r.hi)});
    });
    out.write_text("coefficients_model5.svg", svg::dot_plot(rows, "Model (5): effect of a one-SD change"));
    out.summary.facts.emplace_back("model5 loglik", csv::format_double(full.loglik));
    out.summary.facts.emplace_back("model5 converged", full.converged ? "true" : "false");
  }

  if (res.chow) {
    const auto& s = config.subperiods;
    out.write("subperiods.csv", [&](std::ostream& o) {
      write_model_table(o, {s[0].outcome.label(), s[1].outcome.label(), "pooled"}, res.sub_fits);
    });
    out.write("chow.csv", [&](std::ostream& o) { write_tests(o, {*res.chow}); });
    out.summary.facts.emplace_back("chow statistic", csv::format_double(*res.chow->statistic));
  }

  if (!res.field_fits.empty()) {
    std::vector<std::string> labels;
    std::vector<ModelFit> fits;
    for (const auto& [field, fit] : res.field_fits) {
      labels.push_back(field);
      fits.push_back(fit);
    }
    out.write("fields.csv", [&](std::ostream& o) { write_model_table(o, labels, fits); });
  }

  if (res.zinb) {
    out.write("count_design_matrix.csv", [&](std::ostream& o) { write_design_matrix(o, *res.count_data); });
    out.write("nb2.csv", [&](std::ostream& o) { write_fit_report(o, *res.nb2); });
    out.write("zinb.csv", [&](std::ostream& o) { write_fit_report(o, *res.zinb); });
    out.write("count_models.csv", [&](std::ostream& o) { write_model_table(o, {"NB2", "ZINB"}, {*res.nb2, *res.zinb}); });
    out.write("vuong.csv", [&](std::ostream& o) { write_tests(o, {*res.vuong}); });
  }

  out.write("disparity.csv", [&](std::ostream& o) {
    csv::write_row(o, {"institution_id", "disparity"});
    for (const auto& [id, v] : res.disparity) csv::write_row(o, {id, csv::format_double(v)});
  });
  if (res.disparity_kde) {
    out.write("disparity_kde.csv", [&](std::ostream& o) { write_kde(o, *res.disparity_kde); });
    out.write_text("disparity_kde.svg", svg::line_plot(res.disparity_kde->x, res.disparity_kde->density,
                                                      "Leadership disparity", "disparity", "density"));
  } else {
    out.summary.facts.emplace_back("disparity kde", "skipped: " + res.kde_note);
  }
  return out.summary;
}

RunSummary run_synth(const RunConfig& config) {
  const Corpus corpus = gen_corpus(config.synth);
  OutputDir out(config.out_dir);
  out.write("papers.jsonl", [&](std::ostream& o) { write_papers(o, corpus.papers()); });
  out.write("registry.csv", [&](std::ostream& o) { write_registry(o, corpus.registry_list()); });
  out.write("run.conf", [&](std::ostream& o) {
    o << "papers = papers.jsonl\nregistry = registry.csv\n"
      << "lag_period = " << config.lag_period.label() << '\n'
      << "outcome_period = " << config.outcome_period.label() << '\n'
      << "seed = " << config.seed << '\n';
    if (!config.subperiods.empty()) {
      o << "subperiods = ";
      for (std::size_t k = 0; k < config.subperiods.size(); ++k)
        o << (k ? ", " : "") << config.subperiods[k].outcome.label() << '/' << config.subperiods[k].lag.label();
      o << '\n';
    }
  });
  out.summary.facts.emplace_back("papers", std::to_string(corpus.papers().size()));
  out.summary.facts.emplace_back("institutions", std::to_string(corpus.registry().size()));
  return out.summary;
}

}  // namespace rlflow
