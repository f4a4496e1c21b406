#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace delaycorr::csv {

/// Splits one delimited line. Supports double-quoted fields with "" escapes;
/// surrounding whitespace is trimmed from unquoted fields.
std::vector<std::string> split_line(std::string_view line, char delimiter = ',');

/// Quotes a field only when it contains the delimiter, a quote, or a newline.
std::string escape_field(std::string_view field, char delimiter = ',');

/// Reads a whole CSV table with a header row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws DataError naming `source` if absent.
  std::size_t column(std::string_view name, std::string_view source) const;
};

Table read_table(std::istream& in, char delimiter = ',');
Table read_table_file(const std::filesystem::path& path, char delimiter = ',');

/// Writes `content` to `path` via a temporary sibling file and a rename, so
/// readers never observe a half-written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace delaycorr::csv
