#include "rlflow/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "rlflow/csv.hpp"

namespace rlflow {

using json = nlohmann::json;

Period::Period(int start, int end) : start_year(start), end_year(end) {
  if (start > end)
    throw Error(ErrorCode::InvalidArgument,
                "period start " + std::to_string(start) + " after end " + std::to_string(end));
}

std::string Period::label() const {
  return std::to_string(start_year) + "-" + std::to_string(end_year);
}

Period Period::parse(std::string_view text) {
  auto dash = text.find('-', 1);
  if (dash == std::string_view::npos)
    throw Error(ErrorCode::InvalidArgument, "period must be YYYY-YYYY: '" + std::string(text) + "'");
  try {
    return Period(static_cast<int>(csv::parse_int(text.substr(0, dash))),
                  static_cast<int>(csv::parse_int(text.substr(dash + 1))));
  } catch (const Error&) {
    throw Error(ErrorCode::InvalidArgument, "period must be YYYY-YYYY: '" + std::string(text) + "'");
  }
}

std::size_t PaperRecord::leader_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(affiliations.begin(), affiliations.end(),
                    [](const Affiliation& a) { return a.is_leading; }));
}

std::optional<long long> InstitutionRecord::nsfc(const Period& period) const {
  auto it = nsfc_counts.find(period.label());
  if (it == nsfc_counts.end()) return std::nullopt;
  return it->second;
}

std::string normalize_keyword(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(uc)));
  }
  return out;
}

void normalize_paper(PaperRecord& paper, const std::optional<Period>& year_range) {
  auto fail = [&](const std::string& reason) {
    throw Error(ErrorCode::InvariantViolation, paper.paper_id + ": " + reason);
  };
  if (paper.paper_id.empty()) fail("empty paper_id");

  std::vector<Affiliation> merged;
  std::unordered_map<std::string, std::size_t> pos;
  for (auto& a : paper.affiliations) {
    if (a.institution_id.empty()) fail("empty institution_id");
    auto [it, inserted] = pos.emplace(a.institution_id, merged.size());
    if (inserted)
      merged.push_back(a);
    else
      merged[it->second].is_leading = merged[it->second].is_leading || a.is_leading;
  }
  paper.affiliations = std::move(merged);

  std::vector<std::string> keywords;
  for (const auto& k : paper.keywords) {
    auto n = normalize_keyword(k);
    if (!n.empty()) keywords.push_back(std::move(n));
  }
  paper.keywords = std::move(keywords);

  if (paper.affiliations.empty()) fail("no affiliations");
  if (paper.leader_count() == 0) fail("no leading institution");
  if (year_range && !year_range->contains(paper.year))
    fail("year " + std::to_string(paper.year) + " outside " + year_range->label());
}

namespace {

PaperRecord paper_from_json(const json& j) {
  static const std::set<std::string> allowed = {"paper_id", "year", "field", "keywords",
                                                "affiliations"};
  if (!j.is_object()) throw std::invalid_argument("record is not an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw std::invalid_argument("unexpected field '" + it.key() + "'");
  for (const auto& key : allowed)
    if (!j.contains(key)) throw std::invalid_argument("missing field '" + key + "'");

  PaperRecord p;
  if (!j["paper_id"].is_string()) throw std::invalid_argument("paper_id must be a string");
  p.paper_id = j["paper_id"].get<std::string>();
  if (!j["year"].is_number_integer()) throw std::invalid_argument("year must be an integer");
  p.year = j["year"].get<int>();
  if (!j["field"].is_string()) throw std::invalid_argument("field must be a string");
  p.field = j["field"].get<std::string>();
  if (!j["keywords"].is_array()) throw std::invalid_argument("keywords must be an array");
  for (const auto& k : j["keywords"]) {
    if (!k.is_string()) throw std::invalid_argument("keywords must be strings");
    p.keywords.push_back(k.get<std::string>());
  }
  if (!j["affiliations"].is_array()) throw std::invalid_argument("affiliations must be an array");
  for (const auto& a : j["affiliations"]) {
    if (!a.is_object() || !a.contains("institution_id") || !a.contains("is_leading") ||
        a.size() != 2)
      throw std::invalid_argument("affiliation needs exactly institution_id and is_leading");
    if (!a["institution_id"].is_string() || !a["is_leading"].is_boolean())
      throw std::invalid_argument("affiliation field types");
    p.affiliations.push_back({a["institution_id"].get<std::string>(), a["is_leading"].get<bool>()});
  }
  return p;
}

}  // namespace

PaperParseResult parse_papers(std::istream& in, IngestMode mode,
                              const std::optional<Period>& year_range) {
  PaperParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    PaperRecord paper;
    try {
      paper = paper_from_json(json::parse(line));
    } catch (const std::exception& e) {
      if (mode == IngestMode::Strict) throw ParseError(line_no, e.what());
      result.rejects.push_back({line_no, ErrorCode::MalformedLine, "", e.what()});
      continue;
    }
    try {
      normalize_paper(paper, year_range);
    } catch (const Error& e) {
      if (mode == IngestMode::Strict)
        throw Error(ErrorCode::InvariantViolation, "line " + std::to_string(line_no) + ": " + e.detail());
      result.rejects.push_back({line_no, e.code(), paper.paper_id, e.detail()});
      continue;
    }
    result.papers.push_back(std::move(paper));
  }
  return result;
}

void write_papers(std::ostream& out, const std::vector<PaperRecord>& papers) {
  for (const auto& p : papers) {
    nlohmann::ordered_json j;
    j["paper_id"] = p.paper_id;
    j["year"] = p.year;
    j["field"] = p.field;
    j["keywords"] = p.keywords;
    auto affs = nlohmann::ordered_json::array();
    for (const auto& a : p.affiliations) {
      nlohmann::ordered_json aj;
      aj["institution_id"] = a.institution_id;
      aj["is_leading"] = a.is_leading;
      affs.push_back(std::move(aj));
    }
    j["affiliations"] = std::move(affs);
    out << j.dump() << '\n';
  }
}

std::vector<InstitutionRecord> parse_registry(std::istream& in) {
  static const std::vector<std::string> fixed = {"institution_id", "display_name", "province",
                                                 "latitude", "longitude"};
  csv::Reader reader(in);
  csv::Row header;
  if (!reader.next(header)) throw ParseError(1, "empty registry");
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
  if (header.size() < fixed.size() || !std::equal(fixed.begin(), fixed.end(), header.begin()))
    throw ParseError(1, "header must start with institution_id,display_name,province,latitude,longitude");
  std::vector<std::string> periods;
  for (std::size_t c = fixed.size(); c < header.size(); ++c) {
    const auto& h = header[c];
    if (h.rfind("nsfc_", 0) != 0) throw ParseError(1, "unexpected column '" + h + "'");
    try {
      periods.push_back(Period::parse(h.substr(5)).label());
    } catch (const Error&) {
      throw ParseError(1, "bad period in column '" + h + "'");
    }
  }

  std::vector<InstitutionRecord> out;
  std::set<std::string> seen;
  csv::Row row;
  while (reader.next(row)) {
    auto line_no = reader.line_no();
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != header.size())
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                    std::to_string(row.size()));
    InstitutionRecord r;
    r.institution_id = row[0];
    r.display_name = row[1];
    r.province = row[2];
    if (r.institution_id.empty()) throw ParseError(line_no, "empty institution_id");
    try {
      r.latitude = csv::parse_double(row[3]);
      r.longitude = csv::parse_double(row[4]);
      for (std::size_t k = 0; k < periods.size(); ++k) {
        const auto& cell = row[fixed.size() + k];
        if (cell.empty()) continue;
        auto count = csv::parse_int(cell);
        if (count < 0)
          throw Error(ErrorCode::InvariantViolation,
                      r.institution_id + ": negative nsfc count for " + periods[k]);
        r.nsfc_counts[periods[k]] = count;
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvariantViolation) throw;
      throw ParseError(line_no, e.what());
    }
    if (!(r.latitude >= -90.0 && r.latitude <= 90.0) ||
        !(r.longitude > -180.0 && r.longitude <= 180.0))
      throw Error(ErrorCode::CoordinateOutOfRange, r.institution_id);
    if (!seen.insert(r.institution_id).second)
      throw Error(ErrorCode::DuplicateInstitution, r.institution_id);
    out.push_back(std::move(r));
  }
  return out;
}

void write_registry(std::ostream& out, const std::vector<InstitutionRecord>& registry) {
  std::set<std::string> periods;
  for (const auto& r : registry)
    for (const auto& [p, _] : r.nsfc_counts) periods.insert(p);
  csv::Row header = {"institution_id", "display_name", "province", "latitude", "longitude"};
  for (const auto& p : periods) header.push_back("nsfc_" + p);
  csv::write_row(out, header);
  for (const auto& r : registry) {
    csv::Row row = {r.institution_id, r.display_name, r.province, csv::format_double(r.latitude),
                    csv::format_double(r.longitude)};
    for (const auto& p : periods) {
      auto it = r.nsfc_counts.find(p);
      row.push_back(it == r.nsfc_counts.end() ? "" : std::to_string(it->second));
    }
    csv::write_row(out, row);
  }
}

const InstitutionRecord& Corpus::institution(const InstitutionId& id) const {
  auto it = registry_.find(id);
  if (it == registry_.end()) throw Error(ErrorCode::UnknownInstitution, id);
  return it->second;
}

std::vector<InstitutionRecord> Corpus::registry_list() const {
  std::vector<InstitutionRecord> out;
  out.reserve(registry_.size());
  for (const auto& [_, r] : registry_) out.push_back(r);
  return out;
}

struct CorpusBuilder {
  static Corpus make(std::vector<PaperRecord> papers,
                     std::map<InstitutionId, InstitutionRecord> registry) {
    Corpus c;
    c.papers_ = std::move(papers);
    c.registry_ = std::move(registry);
    return c;
  }
};

AssembleResult assemble_corpus(std::vector<PaperRecord> papers,
                               std::vector<InstitutionRecord> registry, IngestMode mode) {
  std::map<InstitutionId, InstitutionRecord> reg;
  for (auto& r : registry) {
    auto id = r.institution_id;
    if (!reg.emplace(id, std::move(r)).second) throw Error(ErrorCode::DuplicateInstitution, id);
  }

  std::sort(papers.begin(), papers.end(),
            [](const PaperRecord& a, const PaperRecord& b) { return a.paper_id < b.paper_id; });
  for (std::size_t i = 1; i < papers.size(); ++i)
    if (papers[i].paper_id == papers[i - 1].paper_id)
      throw Error(ErrorCode::InvariantViolation, papers[i].paper_id + ": duplicate paper_id");

  AssembleResult result;
  std::vector<PaperRecord> kept;
  kept.reserve(papers.size());
  for (auto& p : papers) {
    auto missing = std::find_if(p.affiliations.begin(), p.affiliations.end(),
                                [&](const Affiliation& a) { return !reg.count(a.institution_id); });
    if (missing != p.affiliations.end()) {
      if (mode == IngestMode::Strict)
        throw Error(ErrorCode::UnknownInstitution, p.paper_id + " references " + missing->institution_id);
      ++result.dropped;
      result.rejects.push_back({0, ErrorCode::UnknownInstitution, p.paper_id,
                                "unknown institution " + missing->institution_id});
      continue;
    }
    kept.push_back(std::move(p));
  }
  result.corpus = CorpusBuilder::make(std::move(kept), std::move(reg));
  return result;
}

Corpus filter_corpus(const Corpus& corpus, const Period& period,
                     const std::optional<std::string>& field) {
  std::vector<PaperRecord> kept;
  for (const auto& p : corpus.papers())
    if (period.contains(p.year) && (!field || p.field == *field)) kept.push_back(p);
  return CorpusBuilder::make(std::move(kept), corpus.registry());
}

std::set<InstitutionId> eligible_institutions(const Corpus& corpus, const Period& period) {
  std::map<InstitutionId, std::set<int>> years_led;
  for (const auto& p : corpus.papers()) {
    if (!period.contains(p.year) || p.institution_count() < 2) continue;
    for (const auto& a : p.affiliations)
      if (a.is_leading) years_led[a.institution_id].insert(p.year);
  }
  std::set<InstitutionId> out;
  for (const auto& [id, years] : years_led)
    if (static_cast<int>(years.size()) == period.length()) out.insert(id);
  return out;
}

}  // namespace rlflow
