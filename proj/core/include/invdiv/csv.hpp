#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace invdiv {

// A header row plus data rows, all cells kept as text. Numbers are written
// with format_number so a table round-trips byte for byte.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws ParseError if absent.
  std::size_t column(std::string_view name) const;

  bool operator==(const CsvTable&) const = default;
};

// RFC 4180 text with "\n" line ends; cells are quoted
// when they contain a comma, quote or newline. Rows must match the header
// width (DimensionError otherwise).
std::string write_csv(const CsvTable& table);

// Inverse of write_csv; also accepts "\r\n" line ends. The first record is
// the header. Throws ParseError on an unterminated quote or ragged row.
CsvTable parse_csv(std::string_view text);

// File variants; IO failures throw std::runtime_error naming the path.
void save_csv(const CsvTable& table, const std::filesystem::path& path);
CsvTable load_csv(const std::filesystem::path& path);

// Writes text to a file, creating parent directories; throws
// std::runtime_error naming the path on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace invdiv
