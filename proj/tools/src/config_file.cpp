#include "abep_cli/config_file.hpp"

#include <fstream>

#include "abep/errors.hpp"

namespace abep::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<ConfigEntry> parse_config(std::istream& in, const std::string& source) {
  std::vector<ConfigEntry> out;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(line) + ": expected key=value, got '" +
                        s + "'");
    ConfigEntry e{line, trim(s.substr(0, eq)), trim(s.substr(eq + 1))};
    if (e.key.empty())
      throw ConfigError(source + ":" + std::to_string(line) + ": empty key");
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<ConfigEntry> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

}  // namespace abep::cli
