// rlflow: research-leadership flow networks and gravity-model estimation.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "rlflow/config.hpp"
#include "rlflow/error.hpp"
#include "rlflow/pipeline.hpp"

namespace {

enum Exit { kOk = 0, kDataError = 1, kNonConvergence = 2, kUsage = 3 };

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string out_dir;
  int threads = 0;
  long long seed = -1;
  bool strict = false;
  bool lenient = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "key = value run configuration");
  cmd->add_option("--set", c.sets, "override one config key (key=value)");
  cmd->add_option("--out-dir", c.out_dir, "output directory");
  cmd->add_option("--threads", c.threads, "worker threads for likelihood evaluation")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "seed for LDA and synthetic generation")->check(CLI::NonNegativeNumber);
  auto* strict = cmd->add_flag("--strict", c.strict, "fail on the first bad record (default)");
  cmd->add_flag("--lenient", c.lenient, "skip bad records and report them")->excludes(strict);
}

rlflow::RunConfig resolve(const Common& c) {
  rlflow::KeyValues values;
  std::filesystem::path base;
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    if (!in) throw rlflow::Error(rlflow::ErrorCode::InvalidArgument, "cannot open config " + c.config);
    values = rlflow::parse_key_values(in);
    base = std::filesystem::path(c.config).parent_path();
  }
  for (const auto& s : c.sets) rlflow::apply_override(values, s);
  if (!c.out_dir.empty()) values["out_dir"] = std::filesystem::absolute(c.out_dir).string();
  if (c.threads > 0) values["threads"] = std::to_string(c.threads);
  if (c.seed >= 0) values["seed"] = std::to_string(c.seed);
  if (c.strict) values["mode"] = "strict";
  if (c.lenient) values["mode"] = "lenient";
  return rlflow::make_run_config(values, base);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Research-leadership flow networks and gravity-model estimation"};
  app.require_subcommand(1);
  Common common;
  auto* validate = app.add_subcommand("validate", "parse inputs and check corpus invariants");
  auto* network = app.add_subcommand("network", "write flow edge lists, rankings and province flows");
  auto* fit = app.add_subcommand("fit", "build the dyad design and estimate the configured models");
  auto* synth = app.add_subcommand("synth", "write a synthetic corpus and registry");
  auto* topics = app.add_subcommand("topics", "fit LDA on the lag period and dump the estimates");
  for (auto* cmd : {validate, network, fit, synth, topics}) add_common(cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  rlflow::RunConfig config;
  try {
    config = resolve(common);
  } catch (const rlflow::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (validate->parsed()) {
      auto report = rlflow::run_validate(config);
      rlflow::write_validate_report(std::cout, report);
      return report.clean() ? kOk : kDataError;
    }
    rlflow::RunSummary summary;
    if (network->parsed()) summary = rlflow::run_network(config);
    if (fit->parsed()) summary = rlflow::run_fit(config);
    if (synth->parsed()) summary = rlflow::run_synth(config);
    if (topics->parsed()) summary = rlflow::run_topics(config);
    rlflow::write_summary(std::cout, summary);
    return kOk;
  } catch (const rlflow::Error& e) {
    std::cerr << "error," << rlflow::to_string(e.code()) << ',' << e.what() << '\n';
    return e.code() == rlflow::ErrorCode::NonConvergence ? kNonConvergence : kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error,Internal," << e.what() << '\n';
    return kDataError;
  }
}
