#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fixtures {

inline std::filesystem::path data_dir() { return SPOC_TEST_DATA; }
inline std::filesystem::path source_dir() { return SPOC_SOURCE_DIR; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Whitespace-separated hex bytes; '#' starts a comment line.
inline std::vector<std::uint8_t> read_hex(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::uint8_t> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream words(line);
    std::string w;
    while (words >> w) out.push_back(static_cast<std::uint8_t>(std::stoul(w, nullptr, 16)));
  }
  return out;
}

}  // namespace fixtures
