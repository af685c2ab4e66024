#include "invdiv/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "invdiv/errors.hpp"

namespace invdiv {

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ParseError("csv: no column named '" + std::string(name) + "'");
}

namespace {

void write_cell(std::string& out, const std::string& cell) {
  const bool quote = cell.find_first_of(",\"\n\r") != std::string::npos;
  if (!quote) {
    out += cell;
    return;
  }
  out += '"';
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

void write_record(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    write_cell(out, cells[i]);
  }
  out += '\n';
}

}  // namespace

std::string write_csv(const CsvTable& table) {
  std::string out;
  write_record(out, table.header);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size())
      throw DimensionError("csv: row " + std::to_string(r + 1) + " has " +
                           std::to_string(table.rows[r].size()) + " cells, header has " +
                           std::to_string(table.header.size()));
    write_record(out, table.rows[r]);
  }
  return out;
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string cell;
  bool in_quotes = false;
  bool any = false;  // the current record has content
  std::size_t line = 1;

  auto end_cell = [&] {
    record.push_back(std::move(cell));
    cell.clear();
  };
  auto end_record = [&] {
    end_cell();
    records.push_back(std::move(record));
    record.clear();
    any = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!cell.empty())
          throw ParseError("csv: stray quote on line " + std::to_string(line));
        in_quotes = true;
        any = true;
        break;
      case ',':
        end_cell();
        any = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        cell += c;
        any = true;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        cell += c;
        any = true;
    }
  }
  if (in_quotes) throw ParseError("csv: unterminated quote starting before line " +
                                  std::to_string(line));
  if (any || !cell.empty() || !record.empty()) end_record();

  CsvTable t;
  if (records.empty()) throw ParseError("csv: empty input");
  t.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size())
      throw ParseError("csv: record " + std::to_string(r + 1) + " has " +
                       std::to_string(records[r].size()) + " cells, header has " +
                       std::to_string(t.header.size()));
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_csv(const CsvTable& table, const std::filesystem::path& path) {
  write_text_file(path, write_csv(table));
}

CsvTable load_csv(const std::filesystem::path& path) { return parse_csv(read_text_file(path)); }

}  // namespace invdiv
