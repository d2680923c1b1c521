#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "naive_sfcm.hpp"
#include "sfcd/grid.hpp"

namespace testing {

inline sfcd::Image random_image(std::size_t width, std::size_t height, std::uint64_t seed,
                                double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> data(width * height);
  for (auto& v : data) v = dist(rng);
  return sfcd::Image(width, height, std::move(data));
}

inline sfcd::Image random_integer_image(std::size_t width, std::size_t height, std::uint64_t seed,
                                        unsigned max_value) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<unsigned> dist(0, max_value);
  std::vector<double> data(width * height);
  for (auto& v : data) v = dist(rng);
  return sfcd::Image(width, height, std::move(data));
}

// Rows of random positive weights normalized to one.
inline sfcd::MembershipField random_membership(std::size_t width, std::size_t height,
                                               std::size_t clusters, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.01, 1.0);
  std::vector<double> values(width * height * clusters);
  for (std::size_t j = 0; j < width * height; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < clusters; ++i) sum += values[j * clusters + i] = dist(rng);
    for (std::size_t i = 0; i < clusters; ++i) values[j * clusters + i] /= sum;
  }
  return sfcd::MembershipField(width, height, clusters, std::move(values));
}

inline naive::Grid to_grid(const sfcd::Image& img) {
  naive::Grid g(img.height(), std::vector<double>(img.width()));
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) g[y][x] = img.at(x, y);
  }
  return g;
}

inline naive::Field to_naive(const sfcd::MembershipField& f) {
  naive::Field out(f.clusters(), std::vector<double>(f.pixels()));
  for (std::size_t j = 0; j < f.pixels(); ++j) {
    for (std::size_t i = 0; i < f.clusters(); ++i) out[i][j] = f(j, i);
  }
  return out;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sfcd_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
