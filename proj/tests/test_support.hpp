#pragma once

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace test {

inline std::filesystem::path data_dir() { return HAHNFIT_TEST_DATA; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hahnfit-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace test
