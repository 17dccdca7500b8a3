#include "crnoma/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "crnoma/errors.hpp"

namespace crnoma {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno), "expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno), "empty key");
    if (cfg.has(key)) throw ConfigError(key, "duplicate key in " + origin);
    cfg.values_.emplace(std::move(key), std::move(value));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError(key, "expected a finite number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty() || t.front() == '-') throw ConfigError(key, "expected a non-negative integer, got '" + text + "'");
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 0);
  if (end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError(key, "expected a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::uint64_t>(v);
}

std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw ConfigError(key, "range must be start:stop:step");
    const double start = parse_double(key, parts[0]);
    const double stop = parse_double(key, parts[1]);
    const double step = parse_double(key, parts[2]);
    if (step <= 0.0 || stop < start) throw ConfigError(key, "range needs step > 0 and stop >= start");
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      // Snap to a clean decimal so 0.1 steps print as 0.3, not 0.30000000000000004.
      const double v = start + static_cast<double>(i) * step;
      out.push_back(std::round(v * 1e9) / 1e9);
    }
    return out;
  }
  std::vector<double> out;
  for (const auto& item : split(t, ',')) {
    if (item.empty()) throw ConfigError(key, "empty list element");
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return parse_double(key, *v);
}

std::optional<std::int64_t> KeyValueConfig::get_int(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  const double d = parse_double(key, *v);
  if (d != std::floor(d)) throw ConfigError(key, "expected an integer, got '" + *v + "'");
  return static_cast<std::int64_t>(d);
}

std::optional<std::uint64_t> KeyValueConfig::get_uint(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return parse_uint(key, *v);
}

std::optional<bool> KeyValueConfig::get_bool(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  std::string s = *v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key, "expected a boolean, got '" + *v + "'");
}

std::optional<std::vector<double>> KeyValueConfig::get_double_list(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return parse_double_list(key, *v);
}

std::optional<std::vector<std::string>> KeyValueConfig::get_string_list(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  auto items = split(*v, ',');
  items.erase(std::remove(items.begin(), items.end(), std::string{}), items.end());
  if (items.empty()) throw ConfigError(key, "empty list");
  return items;
}

std::vector<std::string> KeyValueConfig::unknown_keys(const std::vector<std::string>& known) const {
  std::vector<std::string> out;
  for (const auto& [key, value] : values_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) out.push_back(key);
  }
  return out;
}

}  // namespace crnoma
