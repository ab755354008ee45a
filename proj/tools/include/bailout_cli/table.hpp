#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace bailout::cli {

/// Empty cell: written as an empty CSV field and as JSON null.
struct Missing {};

using Cell = std::variant<Missing, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

/// 12 significant digits, as printf("%.12g").
std::string format_number(double v);

void write_csv(const Table& table, std::ostream& out);
/// Array of row objects keyed by column name.
nlohmann::json to_json(const Table& table);

}  // namespace bailout::cli
