#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "emofuse/emotions.hpp"

// Generators used by the property tests. They are written from scratch on
// purpose so test inputs do not depend on the samplers under test.
namespace testutil {

inline emofuse::Vec7 random_simplex(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(1e-12, 1.0);
  emofuse::Vec7 v;
  double total = 0.0;
  for (int c = 0; c < emofuse::kEmotionCount; ++c) {
    v(c) = -std::log(unit(rng));
    total += v(c);
  }
  return v / total;
}

inline Eigen::MatrixXd random_column_stochastic(std::mt19937_64& rng, int models) {
  std::uniform_real_distribution<double> unit(1e-12, 1.0);
  Eigen::MatrixXd w(models, emofuse::kEmotionCount);
  for (int c = 0; c < emofuse::kEmotionCount; ++c) {
    double total = 0.0;
    for (int m = 0; m < models; ++m) {
      w(m, c) = -std::log(unit(rng));
      total += w(m, c);
    }
    w.col(c) /= total;
  }
  return w;
}

inline emofuse::Vec7 one_hot(emofuse::BasicEmotion emotion) {
  emofuse::Vec7 v = emofuse::Vec7::Zero();
  v(static_cast<int>(emotion)) = 1.0;
  return v;
}

/// Unique empty scratch directory for one test case.
inline std::filesystem::path fresh_dir(const std::string& tag) {
  static const auto stamp =
      std::chrono::steady_clock::now().time_since_epoch().count();
  const auto dir = std::filesystem::temp_directory_path() /
                   ("emofuse-tests-" + std::to_string(stamp)) / tag;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace testutil
