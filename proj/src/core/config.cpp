#include "core/config.hpp"

#include <charconv>
#include <sstream>

namespace msplab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key).has_value();
}

std::optional<std::string> Config::find(const std::string& section,
                                        const std::string& key) const {
  for (const ConfigEntry& e : entries)
    if (e.section == section && e.key == key) return e.value;
  return std::nullopt;
}

std::vector<std::string> Config::find_all(const std::string& section,
                                          const std::string& key) const {
  std::vector<std::string> out;
  for (const ConfigEntry& e : entries)
    if (e.section == section && e.key == key) out.push_back(e.value);
  return out;
}

std::string Config::get(const std::string& section, const std::string& key) const {
  auto v = find(section, key);
  if (!v) throw ConfigError("missing config key [" + section + "] " + key);
  return *v;
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  return find(section, key).value_or(fallback);
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const std::string v = get(section, key);
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key [" + section + "] " + key + " is not a number: " + v);
  }
}

double Config::get_double_or(const std::string& section, const std::string& key,
                             double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

long long Config::get_int(const std::string& section, const std::string& key) const {
  const std::string v = get(section, key);
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config key [" + section + "] " + key + " is not an integer: " + v);
  return out;
}

long long Config::get_int_or(const std::string& section, const std::string& key,
                             long long fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

std::uint64_t Config::get_u64_or(const std::string& section, const std::string& key,
                                 std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config key [" + section + "] " + key + " is not an unsigned integer: " + v);
  return out;
}

bool Config::get_bool_or(const std::string& section, const std::string& key,
                         bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key [" + section + "] " + key + " is not a boolean: " + v);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  for (ConfigEntry& e : entries)
    if (e.section == section && e.key == key) {
      e.value = value;
      return;
    }
  entries.push_back({section, key, value});
}

Config config_parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3)
        throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    c.entries.push_back({section, key, trim(t.substr(eq + 1))});
  }
  return c;
}

std::string config_format(const Config& c) {
  std::ostringstream os;
  std::string section;
  bool first = true;
  for (const ConfigEntry& e : c.entries) {
    if (e.section != section || first) {
      if (!e.section.empty() && e.section != section) {
        if (!first) os << "\n";
        os << "[" << e.section << "]\n";
      }
      section = e.section;
      first = false;
    }
    os << e.key << " = " << e.value << "\n";
  }
  return os.str();
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::istringstream in(csv);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    const std::string t = trim(tok);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw ConfigError("bad number in list: " + t);
    }
  }
  return out;
}

}  // namespace msplab
