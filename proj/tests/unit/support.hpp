#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

namespace ftm::test {

// Binomial standard error for a proportion estimated from `trials` draws.
inline double binomial_sigma(double p, double trials) { return std::sqrt(p * (1.0 - p) / trials); }

inline double rel_diff(double x, double y) { return std::abs(x - y) / std::abs(y); }

// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::path(FTM_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace ftm::test
