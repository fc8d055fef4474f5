#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace axon::csv {

// One record, honoring double-quoted fields with embedded commas, quotes and
// newlines. Empty optional at end of input. lines counts physical lines.
inline std::optional<std::vector<std::string>> read_record(std::istream& in, int& lines) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++lines;
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++lines;
      fields.push_back(std::move(field));
      return fields;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (!any) return std::nullopt;
  ++lines;
  fields.push_back(std::move(field));
  return fields;
}

inline std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace axon::csv
