#include "config.hpp"

#include <fstream>
#include <stdexcept>

namespace multcorr::cli {
namespace {

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::map<std::string, std::string> load_config(
    const std::string& path, const std::set<std::string>& known_keys) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file '" + path + "'");
  }
  std::map<std::string, std::string> values;
  std::map<std::string, int> first_line;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value, got '" + stripped +
                                  "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key");
    }
    if (!known_keys.contains(key)) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
    const auto previous = first_line.find(key);
    if (previous != first_line.end()) {
      throw std::invalid_argument(
          "config line " + std::to_string(line_no) + ": duplicate key '" +
          key + "' (first set at line " +
          std::to_string(previous->second) + ")");
    }
    first_line.emplace(key, line_no);
    values[key] = value;
  }
  return values;
}

}  // namespace multcorr::cli
