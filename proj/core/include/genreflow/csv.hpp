#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace genreflow::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may contain separators, doubled quotes and
/// newlines. A UTF-8 BOM at the start is skipped. Blank lines are ignored.
std::vector<Row> read(std::istream& in, char separator = ',');

std::string quote_field(std::string_view field, char separator = ',');
void write_row(std::ostream& out, const Row& row, char separator = ',');

}  // namespace genreflow::csv
