#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace rlflow::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader: comma separated, double-quote escaping, LF or CRLF endings.
// Quoted fields may span lines. Returns false at end of input.
class Reader {
public:
  explicit Reader(std::istream& in) : in_(in) {}

  bool next(Row& row);
  // Physical line on which the last returned record started (1-based).
  std::size_t line_no() const noexcept { return record_line_; }

private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

// Writes `content` to `path` through a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace rlflow::csv
