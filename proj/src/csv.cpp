#include "derm/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

namespace derm {

std::size_t ProbTable::find(const std::string& id) const {
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == id) return i;
  return npos;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_double(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw std::runtime_error("invalid number '" + text + "' in " + context);
  return value;
}

ProbTable read_prob_table(std::istream& in,
                          const std::vector<std::string>& columns,
                          const std::string& context) {
  std::string expected_header = "image";
  for (const auto& c : columns) expected_header += "," + c;

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty CSV: " + context);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header)
    throw std::runtime_error("bad CSV header in " + context + ": expected '" +
                             expected_header + "', got '" + line + "'");

  ProbTable table;
  table.columns = columns;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != columns.size() + 1)
      throw std::runtime_error("row " + std::to_string(line_no) + " in " +
                               context + " has " +
                               std::to_string(fields.size()) +
                               " fields, expected " +
                               std::to_string(columns.size() + 1));
    if (fields[0].empty())
      throw std::runtime_error("row " + std::to_string(line_no) + " in " +
                               context + " has an empty image id");
    if (!seen.insert(fields[0]).second)
      throw std::runtime_error("duplicate image id '" + fields[0] + "' in " +
                               context);
    std::vector<double> values(columns.size());
    for (std::size_t i = 0; i < columns.size(); ++i)
      values[i] = parse_double(
          fields[i + 1], context + " row '" + fields[0] + "'");
    table.ids.push_back(fields[0]);
    table.rows.push_back(std::move(values));
  }
  return table;
}

ProbTable read_prob_table_file(const std::string& path,
                               const std::vector<std::string>& columns) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return read_prob_table(in, columns, path);
}

std::vector<std::string> class_columns() {
  return {kClassNames.begin(), kClassNames.end()};
}

void write_prob_table(std::ostream& out, const ProbTable& table,
                      int precision) {
  out << "image";
  for (const auto& c : table.columns) out << ',' << c;
  out << '\n';
  char buf[64];
  for (std::size_t i = 0; i < table.ids.size(); ++i) {
    out << table.ids[i];
    for (double v : table.rows[i]) {
      std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace derm
