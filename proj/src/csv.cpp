#include "rlflow/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "rlflow/error.hpp"

namespace rlflow {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::DuplicateInstitution: return "DuplicateInstitution";
    case ErrorCode::CoordinateOutOfRange: return "CoordinateOutOfRange";
    case ErrorCode::UnknownInstitution: return "UnknownInstitution";
    case ErrorCode::MissingNsfcCount: return "MissingNsfcCount";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NonFiniteRegressor: return "NonFiniteRegressor";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::InvalidHyperparameter: return "InvalidHyperparameter";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::AllCensored: return "AllCensored";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::NonIntegerResponse: return "NonIntegerResponse";
    case ErrorCode::NoZeros: return "NoZeros";
    case ErrorCode::MismatchedObservations: return "MismatchedObservations";
    case ErrorCode::FamilyMismatch: return "FamilyMismatch";
    case ErrorCode::RegressorMismatch: return "RegressorMismatch";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace csv {

bool Reader::next(Row& row) {
  row.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  bool field_was_quoted = false;
  int ch;
  record_line_ = line_ + 1;
  while ((ch = in_.get()) != std::char_traits<char>::eof()) {
    any = true;
    char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && field.empty() && !field_was_quoted) {
      in_quotes = true;
      field_was_quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
    } else if (c == '\n') {
      ++line_;
      if (!field.empty() && field.back() == '\r') field.pop_back();
      row.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) throw ParseError(record_line_, "unterminated quoted field");
  if (!any) return false;
  ++line_;
  if (!field.empty() && field.back() == '\r') field.pop_back();
  row.push_back(std::move(field));
  return true;
}

std::string escape(std::string_view field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << escape(row[i]);
  }
  out << '\n';
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error(ErrorCode::Io, "cannot format double");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw Error(ErrorCode::MalformedLine, "not a number: '" + std::string(text) + "'");
  return value;
}

long long parse_int(std::string_view text) {
  long long value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw Error(ErrorCode::MalformedLine, "not an integer: '" + std::string(text) + "'");
  return value;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "rename to " + path.string() + ": " + ec.message());
}

}  // namespace csv
}  // namespace rlflow
