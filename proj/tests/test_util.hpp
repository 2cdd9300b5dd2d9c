#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>

#include "jndadv/tensor.hpp"

namespace jndadv::testutil {

inline GrayImage random_gray(int h, int w, std::uint64_t seed, double lo = 0.0, double hi = 255.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  GrayImage img(h, w);
  for (double& v : img.data()) v = dist(rng);
  return img;
}

inline ImageTensor random_image(int h, int w, int c, std::uint64_t seed, double lo = 0.0,
                                double hi = 255.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  ImageTensor img(h, w, c);
  for (double& v : img.data()) v = dist(rng);
  return img;
}

inline ImageTensor random_integer_image(int h, int w, int c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(0, 255);
  ImageTensor img(h, w, c);
  for (double& v : img.data()) v = dist(rng);
  return img;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace jndadv::testutil
