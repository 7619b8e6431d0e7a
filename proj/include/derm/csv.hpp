#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "derm/image.hpp"

namespace derm {

/// Table of per-image values keyed by image id, e.g. the canonical
/// classification CSV `image,MEL,NV,BCC,AKIEC,BKL,DF,VASC` or the per-level
/// hierarchy tables.
struct ProbTable {
  std::vector<std::string> columns;            // value columns after "image"
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;       // rows[i] matches columns

  std::size_t size() const { return ids.size(); }
  /// Index of id, or npos.
  std::size_t find(const std::string& id) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Parses a CSV with the exact header `image,<columns...>`. Rejects
/// duplicate ids, short/long rows, and non-numeric values. `context` names
/// the table in error messages.
ProbTable read_prob_table(std::istream& in,
                          const std::vector<std::string>& columns,
                          const std::string& context);
ProbTable read_prob_table_file(const std::string& path,
                               const std::vector<std::string>& columns);

/// Canonical 7-class column list (MEL..VASC).
std::vector<std::string> class_columns();

void write_prob_table(std::ostream& out, const ProbTable& table,
                      int precision = 8);

/// Strict locale-independent double parse; throws on trailing garbage.
double parse_double(const std::string& text, const std::string& context);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace derm
