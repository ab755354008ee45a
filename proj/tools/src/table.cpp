#include "bailout_cli/table.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace bailout::cli {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::logic_error("table row width does not match the header");
  rows.push_back(std::move(row));
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

std::string csv_field(const Cell& cell) {
  if (auto d = std::get_if<double>(&cell)) return format_number(*d);
  if (auto s = std::get_if<std::string>(&cell)) {
    if (s->find_first_of(",\"\n") == std::string::npos) return *s;
    std::string quoted = "\"";
    for (char c : *s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + '"';
  }
  return "";
}

}  // namespace

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
    out << '\n';
  }
}

nlohmann::json to_json(const Table& table) {
  auto rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto& name = table.columns[i];
      if (auto d = std::get_if<double>(&row[i]))
        obj[name] = std::isfinite(*d) ? nlohmann::json(*d) : nlohmann::json(format_number(*d));
      else if (auto s = std::get_if<std::string>(&row[i]))
        obj[name] = *s;
      else
        obj[name] = nullptr;
    }
    rows.push_back(std::move(obj));
  }
  return rows;
}

}  // namespace bailout::cli
