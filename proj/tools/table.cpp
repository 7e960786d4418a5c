#include "table.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace bgs_cli {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* l = std::get_if<long>(&c)) return std::to_string(*l);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  return std::get<std::string>(c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    // JSON has no infinities; keep them as strings
    if (!std::isfinite(*d)) return format_double(*d);
    return *d;
  }
  if (const auto* l = std::get_if<long>(&c)) return *l;
  if (const auto* b = std::get_if<bool>(&c)) return *b;
  return std::get<std::string>(c);
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("row width does not match header");
  rows.push_back(std::move(row));
}

void Table::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << csv_field(columns[i]);
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(cell_text(row[i]));
    out << '\n';
  }
}

void Table::write_json(std::ostream& out) const {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& [k, v] : summary) s[k] = cell_json(v);
  doc["summary"] = s;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i) obj[columns[i]] = cell_json(row[i]);
    arr.push_back(std::move(obj));
  }
  doc["rows"] = arr;
  out << doc.dump(2) << '\n';
}

}  // namespace bgs_cli
