#include "genreflow/csv.hpp"

#include <istream>
#include <iterator>
#include <ostream>

#include "genreflow/error.hpp"

namespace genreflow::csv {

std::vector<Row> read(std::istream& in, char separator) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::string_view s(text);
  if (s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);

  std::vector<Row> rows;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row.front().empty())) rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < s.size() && s[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (field_started) {
        throw Error(ErrorCode::MalformedCsv, "stray quote inside unquoted field on line " + std::to_string(line));
      }
      in_quotes = true;
      field_started = true;
    } else if (c == separator) {
      end_field();
    } else if (c == '\r') {
      // tolerated only as part of CRLF
      if (i + 1 >= s.size() || s[i + 1] != '\n') field.push_back(c);
    } else if (c == '\n') {
      end_row();
      ++line;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::MalformedCsv, "unterminated quoted field");
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

std::string quote_field(std::string_view field, char separator) {
  bool needs = field.find_first_of(std::string{'"', '\n', '\r', separator}) != std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const Row& row, char separator) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << separator;
    out << quote_field(row[i], separator);
  }
  out << '\n';
}

}  // namespace genreflow::csv
