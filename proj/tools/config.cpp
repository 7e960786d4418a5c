#include "config.hpp"

#include <charconv>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace bgs_cli {

namespace {

const std::set<std::string> kKeys = {
    "dimension",
    "seed",
    "potential.profile",
    "potential.k0",
    "potential.table",
    "repulsion.kind",
    "repulsion.r0",
    "repulsion.strength",
    "lattice.family",
    "lattice.density",
    "lattice.density_over_rho_d",
    "lattice.basis",
    "lattice.rotation",
    "union.shifts",
    "schedule.eps0",
    "schedule.ratio",
    "schedule.max_steps",
    "schedule.tau",
    "schedule.tol",
    "schedule.extrapolation_order",
    "schedule.max_points",
    "point",
    "eval.radii",
    "eval.rmax",
    "eval.count",
    "energy.direct",
    "gsc.spec_file",
    "gsc.random",
    "gsc.removed",
    "gsc.added",
    "gsc.mu",
    "gsc.direct",
    "scan.r0k0_max",
    "scan.r0k0_points",
    "scan.rho_max",
    "scan.rho_points",
    "scan.families",
    "search.trials",
};

// union.<n>.<field> describes extra components of a lattice union.
const std::regex kUnionKey(R"(union\.[0-9]+\.(family|density|density_over_rho_d|basis|rotation|shift))");

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

std::vector<std::string> split_numbers(const std::string& s) {
  std::string t = s;
  for (char& c : t)
    if (c == ',') c = ' ';
  std::istringstream in(t);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

}  // namespace

bool is_known_key(const std::string& key) {
  return kKeys.count(key) != 0 || std::regex_match(key, kUnionKey);
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError(origin + ":" + std::to_string(n) + ": expected 'key = value', got '" + t +
                       "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw UsageError(origin + ":" + std::to_string(n) + ": missing key before '='");
    if (!is_known_key(key))
      throw UsageError(origin + ":" + std::to_string(n) + ": unknown key '" + key + "'");
    if (cfg.entries_.count(key))
      throw UsageError(origin + ":" + std::to_string(n) + ": duplicate key '" + key +
                       "' (first set on line " + std::to_string(cfg.entries_[key].line) + ")");
    cfg.entries_[key] = {value, n};
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void Config::set(const std::string& key, const std::string& value) {
  if (!is_known_key(key)) throw UsageError("unknown key '" + key + "'");
  entries_[key] = {value, 0};
}

void Config::fail(const std::string& key, const std::string& message) const {
  const auto it = entries_.find(key);
  std::string where = origin_.empty() ? "config" : origin_;
  if (it != entries_.end() && it->second.line > 0)
    where += ":" + std::to_string(it->second.line);
  else if (it != entries_.end())
    where = "command line";
  throw UsageError(where + ": " + key + ": " + message);
}

std::optional<std::string> Config::text(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second.value;
}

std::string Config::text_or(const std::string& key, const std::string& fallback) const {
  return text(key).value_or(fallback);
}

double Config::number(const std::string& key) const {
  const auto v = text(key);
  if (!v) throw UsageError("missing required key '" + key + "'");
  double out = 0.0;
  if (!parse_double(*v, out)) fail(key, "expected a number, got '" + *v + "'");
  return out;
}

double Config::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long Config::integer_or(const std::string& key, long fallback) const {
  const auto v = text(key);
  if (!v) return fallback;
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size())
    fail(key, "expected an integer, got '" + *v + "'");
  return out;
}

bool Config::flag_or(const std::string& key, bool fallback) const {
  const auto v = text(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  fail(key, "expected true or false, got '" + *v + "'");
}

std::vector<double> Config::numbers(const std::string& key) const {
  const auto v = text(key);
  if (!v) throw UsageError("missing required key '" + key + "'");
  std::vector<double> out;
  for (const auto& tok : split_numbers(*v)) {
    double x = 0.0;
    if (!parse_double(tok, x)) fail(key, "'" + tok + "' is not a number");
    out.push_back(x);
  }
  return out;
}

std::vector<std::vector<double>> Config::matrix(const std::string& key, std::size_t width) const {
  const auto v = text(key);
  if (!v) throw UsageError("missing required key '" + key + "'");
  std::vector<std::vector<double>> rows;
  std::istringstream in(*v);
  std::string row;
  while (std::getline(in, row, ';')) {
    if (trim(row).empty()) continue;
    std::vector<double> r;
    for (const auto& tok : split_numbers(row)) {
      double x = 0.0;
      if (!parse_double(tok, x))
        fail(key, "row " + std::to_string(rows.size() + 1) + ": '" + tok + "' is not a number");
      r.push_back(x);
    }
    if (r.size() != width)
      fail(key, "row " + std::to_string(rows.size() + 1) + " has " + std::to_string(r.size()) +
                    " values, expected " + std::to_string(width));
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<std::string> Config::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, e] : entries_)
    if (k.compare(0, prefix.size(), prefix) == 0) out.push_back(k);
  return out;
}

}  // namespace bgs_cli
