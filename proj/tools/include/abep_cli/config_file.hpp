#pragma once

#include <istream>
#include <string>
#include <vector>

namespace abep::cli {

struct ConfigEntry {
  int line = 0;
  std::string key;
  std::string value;
};

// Flat key=value format: blank lines and lines starting with '#' are ignored,
// whitespace around keys and values is trimmed. Throws ConfigError naming the
// source and line for anything else.
std::vector<ConfigEntry> parse_config(std::istream& in, const std::string& source);
std::vector<ConfigEntry> read_config_file(const std::string& path);

}  // namespace abep::cli
