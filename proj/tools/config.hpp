#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bgs_cli {

// Usage-level failure: bad flags, malformed config, missing keys.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat "key = value" configuration with dotted section names. Lines starting
// with '#' are comments; keys must be known to `allowed`.
class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static Config parse(const std::string& text, const std::string& origin = "config");
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::optional<std::string> text(const std::string& key) const;
  std::string text_or(const std::string& key, const std::string& fallback) const;

  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  long integer_or(const std::string& key, long fallback) const;
  bool flag_or(const std::string& key, bool fallback) const;

  // Whitespace- or comma-separated numbers.
  std::vector<double> numbers(const std::string& key) const;
  // Rows separated by ';', each with exactly `width` numbers.
  std::vector<std::vector<double>> matrix(const std::string& key, std::size_t width) const;

  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

  std::string origin_;
  std::map<std::string, Entry> entries_;
};

bool is_known_key(const std::string& key);

}  // namespace bgs_cli
