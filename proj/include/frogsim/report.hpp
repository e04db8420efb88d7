#pragma once

// Tabular experiment output and its CSV / JSON serializations.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace frog {

using Cell = std::variant<std::int64_t, double, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

/// Ordered key/value pairs; order is preserved in every output format.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

struct Report {
  KeyValues config;    // echo of the inputs, master seed included
  Table table;
  KeyValues metadata;  // version, seed, flags raised while running
};

enum class OutputFormat { csv, json };

OutputFormat parse_output_format(const std::string& text);

/// Locale-independent decimal text with 17 significant digits.
std::string format_real(double value);
std::string format_cell(const Cell& cell);

/// CSV: `# key=value` preamble lines for config and metadata, then an
/// RFC 4180 header row and data rows.
void write_csv(std::ostream& out, const Report& report);

/// JSON: {"config": {...}, "rows": [{col: value, ...}], "metadata": {...}}.
void write_json(std::ostream& out, const Report& report);

void write_report(std::ostream& out, const Report& report, OutputFormat format);

}  // namespace frog
