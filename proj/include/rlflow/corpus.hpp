#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rlflow/error.hpp"

namespace rlflow {

using InstitutionId = std::string;

// Inclusive calendar-year range, written as "YYYY-YYYY".
struct Period {
  int start_year = 0;
  int end_year = 0;

  Period() = default;
  Period(int start, int end);

  bool contains(int year) const noexcept { return start_year <= year && year <= end_year; }
  int length() const noexcept { return end_year - start_year + 1; }
  std::string label() const;
  static Period parse(std::string_view text);

  friend bool operator==(const Period&, const Period&) = default;
  friend auto operator<=>(const Period&, const Period&) = default;
};

struct Affiliation {
  InstitutionId institution_id;
  bool is_leading = false;

  friend bool operator==(const Affiliation&, const Affiliation&) = default;
};

struct PaperRecord {
  std::string paper_id;
  int year = 0;
  std::string field;
  std::vector<std::string> keywords;
  // Distinct institutions in first-appearance order.
  std::vector<Affiliation> affiliations;

  // N: distinct institutions on the paper.
  std::size_t institution_count() const noexcept { return affiliations.size(); }
  // LIN: institutions flagged as leading (corresponding-author affiliations).
  std::size_t leader_count() const noexcept;

  friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

struct InstitutionRecord {
  InstitutionId institution_id;
  std::string display_name;
  std::string province;
  double latitude = 0.0;
  double longitude = 0.0;
  // Keyed by Period::label().
  std::map<std::string, long long> nsfc_counts;

  std::optional<long long> nsfc(const Period& period) const;

  friend bool operator==(const InstitutionRecord&, const InstitutionRecord&) = default;
};

enum class IngestMode { Strict, Lenient };

struct Reject {
  std::size_t line_no = 0;
  ErrorCode code = ErrorCode::MalformedLine;
  std::string paper_id;  // empty when the line could not be parsed at all
  std::string reason;
};

struct PaperParseResult {
  std::vector<PaperRecord> papers;
  std::vector<Reject> rejects;
};

// Lowercase, trim, and collapse internal whitespace runs to one space.
std::string normalize_keyword(std::string_view raw);

// Merges repeated institutions (is_leading is OR-ed) and checks the record
// invariants. Throws InvariantViolation.
void normalize_paper(PaperRecord& paper, const std::optional<Period>& year_range = std::nullopt);

// One JSON object per line. Strict mode throws on the first bad line; lenient
// mode skips it and records a Reject. Blank lines are ignored.
PaperParseResult parse_papers(std::istream& in, IngestMode mode = IngestMode::Strict,
                              const std::optional<Period>& year_range = std::nullopt);

// Canonical serialization: fixed key order, one line per paper.
void write_papers(std::ostream& out, const std::vector<PaperRecord>& papers);

// Comma-separated registry with `nsfc_YYYY-YYYY` count columns; blank count
// cells mean "no count for that period".
std::vector<InstitutionRecord> parse_registry(std::istream& in);
void write_registry(std::ostream& out, const std::vector<InstitutionRecord>& registry);

// Papers keyed by paper_id and a registry keyed by institution_id, with full
// referential integrity. Immutable once built.
class Corpus {
public:
  Corpus() = default;

  const std::vector<PaperRecord>& papers() const noexcept { return papers_; }
  const std::map<InstitutionId, InstitutionRecord>& registry() const noexcept { return registry_; }

  const InstitutionRecord& institution(const InstitutionId& id) const;
  bool has_institution(const InstitutionId& id) const { return registry_.count(id) != 0; }
  std::vector<InstitutionRecord> registry_list() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;

private:
  friend struct CorpusBuilder;
  std::vector<PaperRecord> papers_;  // ascending paper_id
  std::map<InstitutionId, InstitutionRecord> registry_;
};

struct AssembleResult {
  Corpus corpus;
  std::size_t dropped = 0;
  std::vector<Reject> rejects;
};

// Throws DuplicateInstitution / InvariantViolation (duplicate paper_id) and,
// in strict mode, UnknownInstitution.
AssembleResult assemble_corpus(std::vector<PaperRecord> papers,
                               std::vector<InstitutionRecord> registry,
                               IngestMode mode = IngestMode::Strict);

Corpus filter_corpus(const Corpus& corpus, const Period& period,
                     const std::optional<std::string>& field = std::nullopt);

// Institutions that lead at least one multi-institution paper in every year
// of `period`.
std::set<InstitutionId> eligible_institutions(const Corpus& corpus, const Period& period);

}  // namespace rlflow
