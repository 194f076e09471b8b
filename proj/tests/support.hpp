#pragma once

#include <string>
#include <vector>

#include "rlflow/corpus.hpp"

namespace testing {

inline rlflow::PaperRecord paper(std::string id, int year, const std::vector<std::string>& institutions,
                                 std::size_t leaders = 1, std::vector<std::string> keywords = {"kw"},
                                 std::string field = "F0") {
  rlflow::PaperRecord p;
  p.paper_id = std::move(id);
  p.year = year;
  p.field = std::move(field);
  p.keywords = std::move(keywords);
  for (std::size_t k = 0; k < institutions.size(); ++k) p.affiliations.push_back({institutions[k], k < leaders});
  return p;
}

inline rlflow::InstitutionRecord institution(std::string id, std::string province, double lat, double lon,
                                             long long nsfc = 10) {
  rlflow::InstitutionRecord r;
  r.institution_id = id;
  r.display_name = "Name " + id;
  r.province = std::move(province);
  r.latitude = lat;
  r.longitude = lon;
  r.nsfc_counts["2008-2012"] = nsfc;
  return r;
}

}  // namespace testing
