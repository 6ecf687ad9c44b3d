#pragma once

// Byte-exact snapshot comparison. Set DIALEVAL_UPDATE_SNAPSHOTS=1 to rewrite
// the files, then review the diff by hand before committing.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace snapshot {

inline std::filesystem::path dir() { return std::filesystem::path(DIALEVAL_FIXTURES) / "snapshots"; }

struct Outcome {
  bool ok = false;
  std::string detail;
};

inline Outcome check(const std::string& name, const std::string& actual) {
  const auto path = dir() / name;
  if (const char* update = std::getenv("DIALEVAL_UPDATE_SNAPSHOTS"); update && *update) {
    std::filesystem::create_directories(dir());
    std::ofstream(path, std::ios::binary) << actual;
    return {true, "updated"};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) return {false, "missing snapshot " + path.string()};
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string expected = ss.str();
  if (expected == actual) return {true, {}};
  std::size_t i = 0;
  while (i < expected.size() && i < actual.size() && expected[i] == actual[i]) ++i;
  return {false, name + " differs at byte " + std::to_string(i)};
}

}  // namespace snapshot
