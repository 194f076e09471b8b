#include <sstream>

#include "doctest.h"

#include "rlflow/corpus.hpp"
#include "rlflow/error.hpp"
#include "support.hpp"

using namespace rlflow;

namespace {

const char* kPaperLine =
    R"({"paper_id":"P1","year":2010,"field":"F0","keywords":["  Graph  Theory ","LDA"],)"
    R"("affiliations":[{"institution_id":"A","is_leading":true},{"institution_id":"B","is_leading":false}]})";

std::vector<InstitutionRecord> registry_abc() {
  return {testing::institution("A", "P01", 39.9, 116.4), testing::institution("B", "P01", 39.0, 117.2),
          testing::institution("C", "P02", 31.2, 121.5)};
}

}  // namespace

TEST_CASE("period parsing and labels") {
  const Period p = Period::parse("2008-2012");
  CHECK(p.start_year == 2008);
  CHECK(p.length() == 5);
  CHECK(p.label() == "2008-2012");
  CHECK(p.contains(2012));
  CHECK_FALSE(p.contains(2013));
  CHECK_THROWS_AS(Period::parse("2012-2008"), Error);
  CHECK_THROWS_AS(Period::parse("2012"), Error);
}

TEST_CASE("keyword normalization") {
  CHECK(normalize_keyword("  Graph \t  THEORY ") == "graph theory");
  CHECK(normalize_keyword("   ").empty());
}

TEST_CASE("paper parsing normalizes and round-trips") {
  std::istringstream in(std::string(kPaperLine) + "\n\n");
  auto res = parse_papers(in);
  REQUIRE(res.papers.size() == 1);
  const auto& p = res.papers[0];
  CHECK(p.keywords == std::vector<std::string>{"graph theory", "lda"});
  CHECK(p.institution_count() == 2);
  CHECK(p.leader_count() == 1);

  std::ostringstream out;
  write_papers(out, res.papers);
  std::istringstream back(out.str());
  auto again = parse_papers(back);
  REQUIRE(again.papers.size() == 1);
  CHECK(again.papers[0] == p);
}

TEST_CASE("repeated affiliations merge with OR-ed leadership") {
  auto p = testing::paper("X", 2010, {"A", "B", "A"}, 1);
  p.affiliations[2].is_leading = false;
  p.affiliations[1].is_leading = true;
  normalize_paper(p);
  REQUIRE(p.affiliations.size() == 2);
  CHECK(p.affiliations[0].is_leading);
  CHECK(p.affiliations[1].is_leading);
}

TEST_CASE("strict mode rejects leaderless papers, lenient mode records them") {
  const std::string bad =
      R"({"paper_id":"P2","year":2010,"field":"F0","keywords":[],"affiliations":[{"institution_id":"A","is_leading":false}]})";
  const std::string text = std::string(kPaperLine) + "\n" + bad + "\n";
  {
    std::istringstream in(text);
    try {
      parse_papers(in, IngestMode::Strict);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvariantViolation);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  std::istringstream in(text);
  auto res = parse_papers(in, IngestMode::Lenient);
  CHECK(res.papers.size() == 1);
  REQUIRE(res.rejects.size() == 1);
  CHECK(res.rejects[0].line_no == 2);
  CHECK(res.rejects[0].paper_id == "P2");
  CHECK(res.rejects[0].code == ErrorCode::InvariantViolation);
}

TEST_CASE("malformed JSON and schema violations are MalformedLine") {
  for (const std::string line : {std::string("{not json"), std::string(R"({"paper_id":"P"})"),
                                 std::string(R"({"paper_id":"P","year":"2010","field":"F","keywords":[],"affiliations":[]})")}) {
    std::istringstream in(line + "\n");
    try {
      parse_papers(in);
      FAIL("expected an error");
    } catch (const ParseError& e) {
      CHECK(e.code() == ErrorCode::MalformedLine);
      CHECK(e.line_no() == 1);
    }
  }
}

TEST_CASE("year range filter") {
  std::istringstream in(std::string(kPaperLine) + "\n");
  CHECK_THROWS_AS(parse_papers(in, IngestMode::Strict, Period(2013, 2017)), Error);
}

TEST_CASE("registry parsing, missing counts and validation") {
  std::istringstream in(
      "\xEF\xBB\xBFinstitution_id,display_name,province,latitude,longitude,nsfc_2008-2012,nsfc_2011-2012\n"
      "A,\"Alpha, Univ\",P01,39.9,116.4,120,\n"
      "B,Beta,P02,31.2,121.5,5,3\n");
  auto reg = parse_registry(in);
  REQUIRE(reg.size() == 2);
  CHECK(reg[0].display_name == "Alpha, Univ");
  CHECK(reg[0].nsfc(Period(2008, 2012)) == 120);
  CHECK_FALSE(reg[0].nsfc(Period(2011, 2012)).has_value());
  CHECK(reg[1].nsfc(Period(2011, 2012)) == 3);

  std::ostringstream out;
  write_registry(out, reg);
  std::istringstream back(out.str());
  CHECK(parse_registry(back) == reg);

  auto expect_code = [](const std::string& body, ErrorCode code) {
    std::istringstream bad("institution_id,display_name,province,latitude,longitude,nsfc_2008-2012\n" + body);
    try {
      parse_registry(bad);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == code);
    }
  };
  expect_code("A,a,P,91,100,1\n", ErrorCode::CoordinateOutOfRange);
  expect_code("A,a,P,10,-180,1\n", ErrorCode::CoordinateOutOfRange);
  expect_code("A,a,P,10,100,1\nA,b,P,11,101,2\n", ErrorCode::DuplicateInstitution);
  expect_code("A,a,P,10,100,-1\n", ErrorCode::InvariantViolation);
  expect_code("A,a,P,ten,100,1\n", ErrorCode::MalformedLine);
}

TEST_CASE("assembly enforces referential integrity") {
  std::vector<PaperRecord> papers = {testing::paper("P2", 2010, {"A", "B"}), testing::paper("P1", 2010, {"A", "Z"})};
  CHECK_THROWS_AS(assemble_corpus(papers, registry_abc()), Error);
  auto lenient = assemble_corpus(papers, registry_abc(), IngestMode::Lenient);
  CHECK(lenient.dropped == 1);
  REQUIRE(lenient.corpus.papers().size() == 1);
  CHECK(lenient.corpus.papers()[0].paper_id == "P2");

  std::vector<PaperRecord> dup = {testing::paper("P1", 2010, {"A"}), testing::paper("P1", 2011, {"B"})};
  try {
    assemble_corpus(dup, registry_abc());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvariantViolation);
  }
  CHECK_THROWS_AS(lenient.corpus.institution("Z"), Error);
}

TEST_CASE("papers are held in paper_id order and filtering works") {
  std::vector<PaperRecord> papers = {testing::paper("P3", 2014, {"A", "B"}, 1, {"kw"}, "F1"),
                                     testing::paper("P1", 2010, {"A", "C"}),
                                     testing::paper("P2", 2013, {"B", "C"})};
  auto c = assemble_corpus(papers, registry_abc()).corpus;
  REQUIRE(c.papers().size() == 3);
  CHECK(c.papers()[0].paper_id == "P1");
  CHECK(filter_corpus(c, Period(2013, 2017)).papers().size() == 2);
  CHECK(filter_corpus(c, Period(2013, 2017), std::string("F1")).papers().size() == 1);
  CHECK(filter_corpus(c, Period(2013, 2017)).registry().size() == 3);
}

TEST_CASE("eligibility needs a multi-institution lead in every year") {
  std::vector<PaperRecord> papers = {testing::paper("P1", 2013, {"A", "B"}), testing::paper("P2", 2014, {"A", "C"}),
                                     testing::paper("P3", 2013, {"B", "C"}), testing::paper("P4", 2014, {"B"}),
                                     testing::paper("P5", 2014, {"C", "A"})};
  auto c = assemble_corpus(papers, registry_abc()).corpus;
  auto e = eligible_institutions(c, Period(2013, 2014));
  CHECK(e == std::set<InstitutionId>{"A"});
}
