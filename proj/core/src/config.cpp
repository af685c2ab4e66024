#include "invdiv/config.hpp"

#include <algorithm>
#include <cctype>

#include "invdiv/errors.hpp"

namespace invdiv {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid configuration:";
  for (const auto& p : problems) out += "\n  " + p;
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_name(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument(join_problems(problems)), problems_(std::move(problems)) {}

const ConfigEntry* ConfigSection::find(std::string_view key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

std::string ConfigSection::title() const {
  if (name.empty()) return "root";
  return label.empty() ? "[" + name + "]" : "[" + name + " " + label + "]";
}

std::vector<const ConfigSection*> ConfigDocument::all(std::string_view name) const {
  std::vector<const ConfigSection*> out;
  for (const auto& s : sections)
    if (s.name == name) out.push_back(&s);
  return out;
}

ConfigDocument parse_config(std::string_view text) {
  ConfigDocument doc;
  doc.sections.emplace_back();
  std::vector<std::string> problems;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    const std::string at = "line " + std::to_string(line_no) + ": ";
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        problems.push_back(at + "section header missing ']'");
        continue;
      }
      const std::string_view inner = trim(line.substr(1, line.size() - 2));
      const std::size_t sp = inner.find_first_of(" \t");
      ConfigSection s;
      s.line = line_no;
      s.name = std::string(inner.substr(0, sp));
      if (sp != std::string_view::npos) s.label = std::string(trim(inner.substr(sp)));
      if (!valid_name(s.name) || (!s.label.empty() && !valid_name(s.label))) {
        problems.push_back(at + "bad section header '" + std::string(line) + "'");
      } else {
        for (const auto& prev : doc.sections)
          if (prev.name == s.name && prev.label == s.label)
            problems.push_back(at + "duplicate section " + s.title() + " (first on line " +
                               std::to_string(prev.line) + ")");
      }
      doc.sections.push_back(std::move(s));
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      problems.push_back(at + "expected 'key = value'");
      continue;
    }
    ConfigEntry e;
    e.key = std::string(trim(line.substr(0, eq)));
    e.value = std::string(trim(line.substr(eq + 1)));
    e.line = line_no;
    if (!valid_name(e.key)) {
      problems.push_back(at + "bad key '" + e.key + "'");
      continue;
    }
    ConfigSection& current = doc.sections.back();
    if (const ConfigEntry* prev = current.find(e.key)) {
      problems.push_back(at + "duplicate key '" + e.key + "' in " + current.title() +
                         " (first on line " + std::to_string(prev->line) + ")");
      continue;
    }
    current.entries.push_back(std::move(e));
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return doc;
}

}  // namespace invdiv
