#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace crnoma {

/// Plain-text `key = value` configuration. `#` starts a comment; blank lines
/// are ignored; keys are case-sensitive and must be unique.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::optional<std::string> get(const std::string& key) const;

  // Typed accessors; throw ConfigError naming the key on malformed values.
  std::optional<double> get_double(const std::string& key) const;
  std::optional<std::int64_t> get_int(const std::string& key) const;
  std::optional<std::uint64_t> get_uint(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;
  std::optional<std::vector<double>> get_double_list(const std::string& key) const;
  std::optional<std::vector<std::string>> get_string_list(const std::string& key) const;

  /// Keys not in `known`; used to reject typos.
  std::vector<std::string> unknown_keys(const std::vector<std::string>& known) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

double parse_double(const std::string& key, const std::string& text);
std::uint64_t parse_uint(const std::string& key, const std::string& text);

/// Parses "a,b,c" or a range "start:stop:step" (inclusive of stop within 1e-9).
std::vector<double> parse_double_list(const std::string& key, const std::string& text);

}  // namespace crnoma
