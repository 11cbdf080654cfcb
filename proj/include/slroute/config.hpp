#pragma once

// Key-value configuration text.
//
//   # comment
//   key = value
//
// Keys and values are trimmed. Later keys override earlier ones.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slroute {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class KeyValues {
 public:
  /// Throws ConfigError naming the offending line.
  static KeyValues parse(std::string_view text);
  /// Throws ConfigError if the file cannot be read.
  static KeyValues load(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  std::optional<std::string> get(const std::string& key) const;
  /// Throws ConfigError if present but not a number.
  std::optional<double> get_number(const std::string& key) const;
  /// Comma-separated list, entries trimmed, empty entries dropped.
  std::optional<std::vector<std::string>> get_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

}  // namespace slroute
