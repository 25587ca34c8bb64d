#pragma once

// RFC-4180 reading/writing helpers shared by the corpus and measure files.

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "satira/error.hpp"

namespace satira::csv {

// RFC-4180 record reader. Returns false at end of input. `line` tracks the
// physical line where the returned record started.
inline bool next_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line,
                     std::size_t& record_line, const std::string& source) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  record_line = line;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (!field.empty() || field_was_quoted)
        throw ParseError(source, line, "stray quote inside unquoted field");
      quoted = true;
      field_was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
    } else if (c == '\r' && in.peek() == '\n') {
      continue;
    } else if (c == '\n') {
      ++line;
      fields.push_back(std::move(field));
      return true;
    } else {
      if (field_was_quoted) throw ParseError(source, line, "text after closing quote");
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError(source, record_line, "unterminated quoted field");
  fields.push_back(std::move(field));
  return true;
}

inline std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace satira::csv
