#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "jndadv/tensor.hpp"

namespace jndadv {

// Square k x k filter, row-major weights.
class Kernel {
 public:
  Kernel(int size, std::vector<double> weights);

  int size() const { return size_; }
  int radius() const { return size_ / 2; }
  double at(int row, int col) const { return weights_[static_cast<std::size_t>(row) * size_ + col]; }
  const std::vector<double>& weights() const { return weights_; }
  double sum() const;

 private:
  int size_;
  std::vector<double> weights_;
};

struct EdgeMap {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;  // 0 or 1

  std::uint8_t at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

// True convolution (kernel flipped) with edge-replicated borders:
//   out(y,x) = sum_{i,j} k(i,j) * img(y + r - i, x + r - j)
GrayImage convolve2d(const GrayImage& img, const Kernel& kernel);

// The four 5x5 oriented high-pass filters used for texture detection,
// each scaled by 1/16.
std::array<Kernel, 4> directional_filter_bank();

// Isotropic Gaussian sampled on the integer grid and normalized to sum 1.
Kernel gaussian_kernel(int size, double sigma);

Kernel box_kernel(int size);

// Canny edge detector with absolute hysteresis thresholds on the Sobel
// gradient magnitude of the Gaussian-smoothed image.
EdgeMap canny(const GrayImage& img, double sigma, double low, double high);

// Thresholds given as fractions of the image's maximum gradient magnitude.
// An image with no gradient yields an empty edge map.
EdgeMap canny_relative(const GrayImage& img, double sigma = 1.0, double low_ratio = 0.1,
                       double high_ratio = 0.3);

}  // namespace jndadv
