#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace bgs_cli {

using Cell = std::variant<double, long, bool, std::string>;

// Shortest decimal string that reads back to the same double; non-finite
// values print as inf, -inf, nan.
std::string format_double(double x);

// One result table. CSV: header row, LF endings, '.' decimals. JSON: an object
// holding the command name, a summary object and the rows as objects.
struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, Cell>> summary;

  void add_row(std::vector<Cell> row);
  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
};

}  // namespace bgs_cli
