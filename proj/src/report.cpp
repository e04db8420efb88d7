#include "frogsim/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace frog {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw std::logic_error("table row width does not match the header");
  }
  rows.push_back(std::move(row));
}

OutputFormat parse_output_format(const std::string& text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown output format '" + text + "'");
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_cell(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, cell);
}

namespace {

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (char ch : raw) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k != 0) out << ',';
    out << csv_field(fields[k]);
  }
  out << "\r\n";
}

nlohmann::ordered_json to_json(const Cell& cell) {
  struct Visitor {
    nlohmann::ordered_json operator()(std::int64_t v) const { return v; }
    nlohmann::ordered_json operator()(double v) const {
      // JSON has no literal for non-finite values.
      if (!std::isfinite(v)) return format_real(v);
      return v;
    }
    nlohmann::ordered_json operator()(bool v) const { return v; }
    nlohmann::ordered_json operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, cell);
}

nlohmann::ordered_json to_json(const KeyValues& kv) {
  nlohmann::ordered_json obj = nlohmann::ordered_json::object();
  for (const auto& [key, value] : kv) obj[key] = value;
  return obj;
}

}  // namespace

void write_csv(std::ostream& out, const Report& report) {
  for (const auto& [key, value] : report.config) out << "# config." << key << '=' << value << "\r\n";
  for (const auto& [key, value] : report.metadata) {
    out << "# metadata." << key << '=' << value << "\r\n";
  }
  write_csv_row(out, report.table.columns);
  std::vector<std::string> fields;
  for (const auto& row : report.table.rows) {
    fields.clear();
    for (const auto& cell : row) fields.push_back(format_cell(cell));
    write_csv_row(out, fields);
  }
}

void write_json(std::ostream& out, const Report& report) {
  nlohmann::ordered_json doc;
  doc["config"] = to_json(report.config);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : report.table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < row.size(); ++k) obj[report.table.columns[k]] = to_json(row[k]);
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  doc["metadata"] = to_json(report.metadata);
  out << doc.dump(2) << '\n';
}

void write_report(std::ostream& out, const Report& report, OutputFormat format) {
  if (format == OutputFormat::csv) {
    write_csv(out, report);
  } else {
    write_json(out, report);
  }
}

}  // namespace frog
