#include "jndadv/toy_dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace jndadv {

ImageTensor make_toy_image(int label, std::uint64_t seed, const ToyDatasetOptions& opt) {
  if (label < 0 || label >= kToyClasses) throw std::invalid_argument("toy dataset: bad label");
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  std::normal_distribution<double> noise(0.0, opt.noise_sigma);

  const int s = opt.size;
  const double level = uniform(50.0, 200.0) + (label - 1.5) * 6.0;
  const double slope_x = uniform(-1.5, 1.5);
  const double slope_y = uniform(-1.5, 1.5);
  double tint[3];
  for (double& t : tint) t = uniform(-15.0, 15.0);

  const int patch_w = static_cast<int>(std::lround(uniform(0.5, 0.85) * s));
  const int patch_h = static_cast<int>(std::lround(uniform(0.5, 0.85) * s));
  const int patch_x = static_cast<int>(uniform(0.0, static_cast<double>(s - patch_w + 1)));
  const int patch_y = static_cast<int>(uniform(0.0, static_cast<double>(s - patch_h + 1)));
  const double theta = (label * 45.0 + uniform(-8.0, 8.0)) * M_PI / 180.0;
  const double freq = uniform(0.12, 0.22);
  const double amplitude = uniform(25.0, 55.0);
  const double phase = uniform(0.0, 2.0 * M_PI);

  ImageTensor img(s, s, opt.channels);
  for (int y = 0; y < s; ++y) {
    for (int x = 0; x < s; ++x) {
      double base = level + slope_x * (x - s / 2.0) + slope_y * (y - s / 2.0);
      if (x >= patch_x && x < patch_x + patch_w && y >= patch_y && y < patch_y + patch_h) {
        base += amplitude * std::sin(2.0 * M_PI * freq * (x * std::cos(theta) + y * std::sin(theta)) + phase);
      }
      for (int c = 0; c < opt.channels; ++c) {
        const double v = base + (opt.channels == 3 ? tint[c] : 0.0) + noise(rng);
        img.at(y, x, c) = std::clamp(std::round(v), 0.0, kMaxIntensity);
      }
    }
  }
  return img;
}

Dataset make_toy_dataset(const ToyDatasetOptions& opt) {
  if (opt.size < 8 || opt.size % 4 != 0) throw std::invalid_argument("toy dataset: size must be a multiple of 4, >= 8");
  Dataset data;
  data.num_classes = kToyClasses;
  std::mt19937_64 seeds(opt.seed);
  auto emit = [&](int count, Split split) {
    for (int i = 0; i < count; ++i) {
      const int label = i % kToyClasses;
      data.add(make_toy_image(label, seeds(), opt), label, split);
    }
  };
  emit(opt.train_count, Split::train);
  emit(opt.test_count, Split::test);
  return data;
}

}  // namespace jndadv
