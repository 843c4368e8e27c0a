#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "conetrap/table.hpp"

namespace conetrap {

TableFormat parse_format(const std::string& name) {
  if (name == "csv") return TableFormat::Csv;
  if (name == "json") return TableFormat::Json;
  fail(Errc::ConfigValidationError, "format must be csv or json");
}

namespace {

bool is_numeric_cell(const std::string& s) {
  if (s.empty()) return false;
  const char* c = s.c_str();
  char* end = nullptr;
  std::strtod(c, &end);
  return end != c && *end == '\0';
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out;
}

void render_csv(const SweepTable& table, std::ostream& out) {
  for (const auto& h : table.header) out << "# " << h << "\n";
  if (table.columns.empty()) return;
  for (size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << row[i];
    }
    out << "\n";
  }
}

void render_json(const SweepTable& table, std::ostream& out) {
  out << "{\n  \"header\": [";
  for (size_t i = 0; i < table.header.size(); ++i) {
    out << (i ? ", " : "") << '"' << json_escape(table.header[i]) << '"';
  }
  out << "],\n  \"columns\": [";
  for (size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? ", " : "") << '"' << json_escape(table.columns[i]) << '"';
  }
  out << "],\n  \"rows\": [";
  for (size_t r = 0; r < table.rows.size(); ++r) {
    out << (r ? ",\n    " : "\n    ") << "[";
    const auto& row = table.rows[r];
    for (size_t i = 0; i < row.size(); ++i) {
      out << (i ? ", " : "");
      if (row[i].empty()) {
        out << "null";
      } else if (is_numeric_cell(row[i])) {
        out << row[i];
      } else {
        out << '"' << json_escape(row[i]) << '"';
      }
    }
    out << "]";
  }
  out << (table.rows.empty() ? "]" : "\n  ]") << "\n}\n";
}

}  // namespace

void write_table(const SweepTable& table, std::ostream& out, TableFormat format) {
  if (format == TableFormat::Csv) {
    render_csv(table, out);
  } else {
    render_json(table, out);
  }
  out.flush();
  if (!out) fail(Errc::IoError, "failed writing table output");
}

std::string render_table(const SweepTable& table, TableFormat format) {
  std::ostringstream ss;
  write_table(table, ss, format);
  return ss.str();
}

SweepTable read_csv_table(std::istream& in) {
  SweepTable table;
  std::string line;
  bool have_columns = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      size_t start = line.size() > 1 && line[1] == ' ' ? 2 : 1;
      table.header.push_back(line.substr(start));
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    if (!have_columns) {
      table.columns = cells;
      have_columns = true;
    } else {
      table.rows.push_back(cells);
    }
  }
  return table;
}

}  // namespace conetrap
