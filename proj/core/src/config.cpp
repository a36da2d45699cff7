#include "loopgas/config.hpp"

#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace loopgas {
namespace {

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::invalid_argument("setting '" + key + "' has unparsable value '" + value + "'");
}

template <typename T>
T parse_scalar(const std::string& key, const std::string& value);

template <>
double parse_scalar<double>(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value);
  }
  if (used != value.size()) bad_value(key, value);
  return parsed;
}

template <>
int parse_scalar<int>(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long parsed = 0;
  try {
    parsed = std::stol(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value);
  }
  if (used != value.size() || parsed < INT32_MIN || parsed > INT32_MAX) bad_value(key, value);
  return int(parsed);
}

template <>
std::uint64_t parse_scalar<std::uint64_t>(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  std::uint64_t parsed = 0;
  try {
    parsed = std::stoull(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value);
  }
  if (used != value.size()) bad_value(key, value);
  return parsed;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& value) {
  std::vector<T> out;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const std::string token = trim(item);
    if (token.empty()) bad_value(key, value);
    out.push_back(parse_scalar<T>(key, token));
  }
  return out;
}

}  // namespace

Settings parse_settings(std::istream& in) {
  Settings out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("settings line " + std::to_string(number) +
                                  " is not a key=value assignment");
    const std::string key = trim(stripped.substr(0, eq));
    if (key.empty())
      throw std::invalid_argument("settings line " + std::to_string(number) + " has an empty key");
    out[key] = trim(stripped.substr(eq + 1));
  }
  return out;
}

Settings parse_settings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open settings file '" + path + "'");
  return parse_settings(in);
}

double setting_double(const Settings& s, const std::string& key, double fallback) {
  const auto it = s.find(key);
  return it == s.end() ? fallback : parse_scalar<double>(key, it->second);
}

int setting_int(const Settings& s, const std::string& key, int fallback) {
  const auto it = s.find(key);
  return it == s.end() ? fallback : parse_scalar<int>(key, it->second);
}

std::uint64_t setting_u64(const Settings& s, const std::string& key, std::uint64_t fallback) {
  const auto it = s.find(key);
  return it == s.end() ? fallback : parse_scalar<std::uint64_t>(key, it->second);
}

std::string setting_string(const Settings& s, const std::string& key, std::string fallback) {
  const auto it = s.find(key);
  return it == s.end() ? std::move(fallback) : it->second;
}

std::vector<double> setting_double_list(const Settings& s, const std::string& key,
                                        std::vector<double> fallback) {
  const auto it = s.find(key);
  return it == s.end() ? std::move(fallback) : parse_list<double>(key, it->second);
}

std::vector<int> setting_int_list(const Settings& s, const std::string& key,
                                  std::vector<int> fallback) {
  const auto it = s.find(key);
  return it == s.end() ? std::move(fallback) : parse_list<int>(key, it->second);
}

}  // namespace loopgas
