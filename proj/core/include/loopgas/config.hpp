#pragma once

// Flat key=value settings files: one assignment per line, '#' starts a
// comment, whitespace around keys and values is trimmed, the last assignment
// to a key wins.  Typed accessors fall back when a key is absent and throw
// std::invalid_argument naming the key when a value does not parse.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace loopgas {

using Settings = std::map<std::string, std::string>;

Settings parse_settings(std::istream& in);
Settings parse_settings_file(const std::string& path);

double setting_double(const Settings& s, const std::string& key, double fallback);
int setting_int(const Settings& s, const std::string& key, int fallback);
std::uint64_t setting_u64(const Settings& s, const std::string& key, std::uint64_t fallback);
std::string setting_string(const Settings& s, const std::string& key, std::string fallback);

// Comma-separated lists; an empty value yields an empty list.
std::vector<double> setting_double_list(const Settings& s, const std::string& key,
                                        std::vector<double> fallback);
std::vector<int> setting_int_list(const Settings& s, const std::string& key,
                                  std::vector<int> fallback);

}  // namespace loopgas
