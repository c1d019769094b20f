#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fragclass {

/// Flat key/value configuration text: one `key = value` per line, `#` starts
/// a comment, blank lines ignored. Unknown keys are rejected after parsing
/// so typos cannot silently fall back to defaults.
class Config {
 public:
  Config() = default;

  static Config parse(std::istream& is) {
    Config cfg;
    std::string line;
    long line_no = 0;
    while (std::getline(is, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("config line " + std::to_string(line_no) +
                                 ": expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw std::runtime_error("config line " + std::to_string(line_no) + ": empty key");
      if (!cfg.values_.emplace(key, value).second)
        throw std::runtime_error("config line " + std::to_string(line_no) + ": duplicate key '" +
                                 key + "'");
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config '" + path + "'");
    return parse(is);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    used_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  long get_int(const std::string& key, long fallback) const {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(it->second, &pos);
    } catch (...) {
      pos = 0;
    }
    if (pos != it->second.size())
      throw std::runtime_error("config key '" + key + "': expected integer, got '" + it->second +
                               "'");
    return v;
  }

  double get_double(const std::string& key, double fallback) const {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(it->second, &pos);
    } catch (...) {
      pos = 0;
    }
    if (pos != it->second.size())
      throw std::runtime_error("config key '" + key + "': expected number, got '" + it->second +
                               "'");
    return v;
  }

  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return std::stoull(it->second);
    } catch (...) {
      throw std::runtime_error("config key '" + key + "': expected unsigned integer");
    }
  }

  /// Call once all consumers have read their keys.
  void reject_unused() const {
    for (const auto& [key, value] : values_)
      if (!used_.count(key))
        throw std::runtime_error("config: unknown key '" + key + "'");
  }

  const std::map<std::string, std::string>& raw() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace fragclass
