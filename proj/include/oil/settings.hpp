#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace oil {

// Flat key=value run settings. Lines starting with '#' and blank lines are
// ignored; whitespace around keys and values is trimmed.
class Settings {
 public:
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  // Throw ConfigError on a missing key or a value that does not parse.
  const std::string& get(const std::string& key) const;
  int get_int(const std::string& key) const;
  long get_long(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  // Sorted "key=value\n" lines.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
};

Settings parse_settings(std::string_view text);
Settings load_settings_file(const std::filesystem::path& path);

// defaults, overlaid by the file, overlaid by explicit flags. Keys that are
// not in `defaults` are rejected with ConfigError.
Settings resolve_settings(const Settings& defaults, const Settings& file, const Settings& flags);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

}  // namespace oil
