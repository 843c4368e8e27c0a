#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "conetrap/types.hpp"

namespace conetrap {

// One output artifact: '#'-prefixed header lines (config echo, code version,
// mesh sizes, warnings), a fixed column schema, and preformatted row cells.
// Floats are already rendered at 12 significant digits; an empty cell means
// "no value".
struct SweepTable {
  std::vector<std::string> header;  // stored without the leading "# "
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

enum class TableFormat { Csv, Json };

TableFormat parse_format(const std::string& name);  // "csv" | "json"

// Serialize. CSV: header lines, column line, comma-joined rows. JSON mirrors
// the same cells: numeric text stays a JSON number, empty becomes null.
// Raises IoError if the stream fails.
void write_table(const SweepTable& table, std::ostream& out, TableFormat format);
std::string render_table(const SweepTable& table, TableFormat format);

// Parse a CSV artifact produced by write_table back into a SweepTable.
SweepTable read_csv_table(std::istream& in);

}  // namespace conetrap
