#include "oil/settings.hpp"

#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "oil/errors.hpp"

namespace oil {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw ConfigError("setting '" + key + "' = '" + value + "' is not " + what);
}

}  // namespace

const std::string& Settings::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing setting '" + key + "'");
  return it->second;
}

long Settings::get_long(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  errno = 0;
  const long out = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno != 0) bad_value(key, v, "an integer");
  return out;
}

int Settings::get_int(const std::string& key) const {
  const long v = get_long(key);
  if (v < INT32_MIN || v > INT32_MAX) bad_value(key, get(key), "a 32-bit integer");
  return static_cast<int>(v);
}

std::uint64_t Settings::get_u64(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  errno = 0;
  const unsigned long long out = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v[0] == '-' || *end != '\0' || errno != 0) bad_value(key, v, "a non-negative integer");
  return out;
}

double Settings::get_double(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0') bad_value(key, v, "a number");
  return out;
}

std::string Settings::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

Settings parse_settings(std::string_view text) {
  Settings s;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + " has no '=': " + t);
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + " has an empty key");
    s.set(key, trim(std::string_view(t).substr(eq + 1)));
  }
  return s;
}

Settings load_settings_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_settings(buf.str());
}

Settings resolve_settings(const Settings& defaults, const Settings& file, const Settings& flags) {
  Settings out = defaults;
  for (const Settings* layer : {&file, &flags}) {
    for (const auto& [k, v] : layer->values()) {
      if (!defaults.has(k)) throw ConfigError("unknown setting '" + k + "'");
      out.set(k, v);
    }
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace oil
