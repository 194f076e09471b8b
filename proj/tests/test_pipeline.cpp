#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "rlflow/config.hpp"
#include "rlflow/error.hpp"
#include "rlflow/pipeline.hpp"

using namespace rlflow;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rlflow_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

KeyValues small_run() {
  return {{"synth.institutions", "40"}, {"synth.papers_per_year", "300"}, {"lda.topics", "5"},
          {"lda.iterations", "150"},    {"lda.burn_in", "50"},            {"lda.thin", "10"},
          {"models", "tobit, zinb"},    {"subperiods", "2013-2014/2011-2012, 2016-2017/2014-2015"}};
}

}  // namespace

TEST_CASE("key-value parsing and overrides") {
  std::istringstream in("# comment\npapers = a.jsonl\n\n  seed=7  # trailing\n");
  auto kv = parse_key_values(in);
  CHECK(kv.at("papers") == "a.jsonl");
  CHECK(kv.at("seed") == "7");
  apply_override(kv, "lda.topics=4");
  CHECK(kv.at("lda.topics") == "4");
  CHECK_THROWS_AS(apply_override(kv, "novalue"), Error);
  std::istringstream bad("just words\n");
  CHECK_THROWS_AS(parse_key_values(bad), Error);
}

TEST_CASE("run configuration") {
  auto cfg = make_run_config({{"papers", "p.jsonl"}, {"seed", "9"}, {"counting", "full"}}, "/data");
  CHECK(cfg.papers == fs::path("/data/p.jsonl"));
  CHECK(cfg.seed == 9);
  CHECK(cfg.lda.seed == 9);
  CHECK(cfg.synth.seed == 9);
  CHECK(cfg.counting == Counting::Full);
  CHECK_THROWS_AS(make_run_config({{"no_such_key", "1"}}), Error);
  CHECK_THROWS_AS(make_run_config({{"lag_period", "2013-2017"}}), Error);
  CHECK_THROWS_AS(make_run_config({{"subperiods", "2013-2014/2011-2012"}}), Error);
  CHECK_THROWS_AS(make_run_config({{"subperiods", "2013-2015/2011-2012, 2015-2017/2013-2014"}}), Error);
  CHECK_THROWS_AS(make_run_config({{"top_k", "0"}}), Error);
  auto sub = make_run_config(small_run());
  REQUIRE(sub.subperiods.size() == 2);
  CHECK(sub.subperiods[1].lag == Period(2014, 2015));
  CHECK(sub.zinb);
}

TEST_CASE("gravity ladder is nested") {
  const auto& ladder = gravity_ladder();
  REQUIRE(ladder.size() == 5);
  for (std::size_t m = 1; m < 5; ++m) {
    CHECK(ladder[m].size() == ladder[m - 1].size() + 1);
    CHECK(std::equal(ladder[m - 1].begin(), ladder[m - 1].end(), ladder[m].begin()));
  }
  CHECK(ladder[4].back() == "ln_econ");
}

TEST_CASE("synth, validate, network and fit run end to end") {
  const fs::path dir = fresh_dir("e2e");
  auto kv = small_run();
  kv["out_dir"] = dir.string();
  auto cfg = make_run_config(kv);
  auto s = run_synth(cfg);
  CHECK(fs::exists(dir / "papers.jsonl"));
  const std::string first = slurp(dir / "papers.jsonl");
  run_synth(cfg);
  CHECK(slurp(dir / "papers.jsonl") == first);

  std::ifstream conf(dir / "run.conf");
  auto run_kv = parse_key_values(conf);
  for (const auto& [k, v] : small_run()) run_kv.insert({k, v});
  run_kv["out_dir"] = (dir / "out").string();
  auto run = make_run_config(run_kv, dir);
  REQUIRE(run.subperiods.size() == 2);

  auto report = run_validate(run);
  CHECK(report.clean());
  CHECK(report.papers == 3000);

  auto net = run_network(run);
  CHECK(fs::exists(dir / "out" / "edges_outcome.csv"));
  CHECK(fs::exists(dir / "out" / "disparity_lag.csv"));

  auto loaded = load_corpus(run);
  auto fit = fit_pipeline(loaded.corpus, run);
  REQUIRE(fit.ladder.size() == 5);
  for (std::size_t m = 1; m < 5; ++m) CHECK(fit.ladder[m].lr_chi2 >= fit.ladder[m - 1].lr_chi2 - 1e-6);
  CHECK(fit.chow.has_value());
  CHECK(fit.zinb.has_value());
  CHECK(fit.vuong.has_value());
  CHECK(fit.vifs.size() == 7);

  run_fit(run);
  for (const char* f : {"design_matrix.csv", "tobit_ladder.csv", "chow.csv", "zinb.csv", "vuong.csv", "descriptive.csv",
                        "disparity_kde.svg", "coefficients_model5.svg"})
    CHECK_MESSAGE(fs::exists(dir / "out" / f), f);
  std::ifstream dm(dir / "out" / "design_matrix.csv");
  auto data = read_design_matrix(dm);
  CHECK(data.rows() == fit.data.rows());
  CHECK(data.X == fit.data.X);
}

TEST_CASE("validate flags leaderless papers in strict mode only") {
  const fs::path dir = fresh_dir("validate");
  {
    std::ofstream reg(dir / "registry.csv");
    reg << "institution_id,display_name,province,latitude,longitude,nsfc_2008-2012\n"
           "A,a,P1,30,110,5\nB,b,P2,31,111,6\n";
    std::ofstream pap(dir / "papers.jsonl");
    pap << R"({"paper_id":"P1","year":2014,"field":"F0","keywords":["x"],"affiliations":[{"institution_id":"A","is_leading":true},{"institution_id":"B","is_leading":false}]})"
        << "\n"
        << R"({"paper_id":"P2","year":2014,"field":"F0","keywords":["x"],"affiliations":[{"institution_id":"A","is_leading":false}]})"
        << "\n";
  }
  auto cfg = make_run_config({{"out_dir", "out"}}, dir);
  cfg.mode = IngestMode::Lenient;
  auto lenient = run_validate(cfg);
  CHECK(lenient.rejects.size() == 1);
  CHECK(lenient.clean());
  cfg.mode = IngestMode::Strict;
  auto strict = run_validate(cfg);
  CHECK_FALSE(strict.clean());
  std::ostringstream out;
  write_validate_report(out, strict);
  CHECK(out.str().find("InvariantViolation") != std::string::npos);
}
