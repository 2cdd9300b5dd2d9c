#pragma once

#include <cstdint>

#include "jndadv/oracle.hpp"

namespace jndadv {

// Procedural 4-class image set. Each image is a smooth luminance ramp with a
// rectangular grating patch; the class sets the grating orientation
// (0, 45, 90, 135 degrees) and a small luminance offset. Pixel values are
// integers so images survive a PNM round trip unchanged.
struct ToyDatasetOptions {
  std::uint64_t seed = 7;
  int train_count = 1600;
  int test_count = 400;
  int size = 32;
  int channels = 3;
  double noise_sigma = 3.0;
};

inline constexpr int kToyClasses = 4;

ImageTensor make_toy_image(int label, std::uint64_t seed, const ToyDatasetOptions& options);
Dataset make_toy_dataset(const ToyDatasetOptions& options);

}  // namespace jndadv
