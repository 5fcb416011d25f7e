#pragma once
// Flat structured-text configuration: `key = value` lines under [section]
// headers, `#` comment lines, repeated keys allowed and order-preserving.
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace msplab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigEntry {
  std::string section;  // "" for the preamble
  std::string key;
  std::string value;
};

struct Config {
  std::vector<ConfigEntry> entries;

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> find(const std::string& section, const std::string& key) const;
  std::vector<std::string> find_all(const std::string& section, const std::string& key) const;

  // typed getters; the _or forms fall back, the plain forms throw ConfigError
  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key, double fallback) const;
  long long get_int(const std::string& section, const std::string& key) const;
  long long get_int_or(const std::string& section, const std::string& key,
                       long long fallback) const;
  std::uint64_t get_u64_or(const std::string& section, const std::string& key,
                           std::uint64_t fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;

  void set(const std::string& section, const std::string& key, const std::string& value);
};

Config config_parse(const std::string& text);
std::string config_format(const Config& c);

std::vector<double> parse_double_list(const std::string& csv);  // "a,b,c"

}  // namespace msplab
