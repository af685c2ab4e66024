#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace invdiv {

// Flat key-value text with sections:
//
//   # comment (also ';')
//   key = value            entries before any header belong to the root
//   [section]
//   [section label]        labelled sections may repeat with distinct labels
//
// Keys and labels are [A-Za-z0-9_.-]+; values run to the end of the line
// with surrounding whitespace removed. Inline comments are not recognized,
// so values may contain '#'.
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct ConfigSection {
  std::string name;   // empty for the root
  std::string label;  // empty when the header has none
  int line = 0;
  std::vector<ConfigEntry> entries;

  const ConfigEntry* find(std::string_view key) const;
  // "[name label]" or "[name]"; "root" for the root section.
  std::string title() const;
};

struct ConfigDocument {
  // sections[0] is always the root.
  std::vector<ConfigSection> sections;

  std::vector<const ConfigSection*> all(std::string_view name) const;
};

// Throws ConfigError listing every syntax problem with its line number:
// malformed lines, bad names, duplicate keys in a section and duplicate
// section headers.
ConfigDocument parse_config(std::string_view text);

}  // namespace invdiv
