#include "jndadv/imgproc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace jndadv {

Kernel::Kernel(int size, std::vector<double> weights) : size_(size), weights_(std::move(weights)) {
  if (size <= 0 || size % 2 == 0) throw std::invalid_argument("Kernel: size must be odd and positive");
  if (weights_.size() != static_cast<std::size_t>(size) * size) {
    throw std::invalid_argument("Kernel: weight count does not match size");
  }
}

double Kernel::sum() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

namespace {

GrayImage convolve_replicate(const GrayImage& img, const Kernel& kernel) {
  const int h = img.height();
  const int w = img.width();
  const int r = kernel.radius();
  const int k = kernel.size();
  GrayImage out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) {
        const int sy = std::clamp(y + r - i, 0, h - 1);
        for (int j = 0; j < k; ++j) {
          const int sx = std::clamp(x + r - j, 0, w - 1);
          acc += kernel.at(i, j) * img.at(sy, sx);
        }
      }
      out.at(y, x) = acc;
    }
  }
  return out;
}

}  // namespace

GrayImage convolve2d(const GrayImage& img, const Kernel& kernel) {
  if (kernel.size() > std::min(img.height(), img.width())) {
    throw std::invalid_argument("convolve2d: kernel larger than image");
  }
  return convolve_replicate(img, kernel);
}

std::array<Kernel, 4> directional_filter_bank() {
  auto scaled = [](std::vector<double> w) {
    for (double& v : w) v /= 16.0;
    return Kernel(5, std::move(w));
  };
  // clang-format off
  return {
      scaled({ 0,  0,  0,  0,  0,
               1,  3,  8,  3,  1,
               0,  0,  0,  0,  0,
              -1, -3, -8, -3, -1,
               0,  0,  0,  0,  0}),
      scaled({ 0,  0,  1,  0,  0,
               0,  8,  3,  0,  0,
               1,  3,  0, -3, -1,
               0,  0, -3, -8,  0,
               0,  0, -1,  0,  0}),
      scaled({ 0,  0,  1,  0,  0,
               0,  0,  3,  8,  0,
              -1, -3,  0,  3,  1,
               0, -8, -3,  0,  0,
               0,  0, -1,  0,  0}),
      scaled({ 0,  1,  0, -1,  0,
               0,  3,  0, -3,  0,
               0,  8,  0, -8,  0,
               0,  3,  0, -3,  0,
               0,  1,  0, -1,  0}),
  };
  // clang-format on
}

Kernel gaussian_kernel(int size, double sigma) {
  if (size <= 0 || size % 2 == 0) throw std::invalid_argument("gaussian_kernel: size must be odd");
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_kernel: sigma must be positive");
  const int r = size / 2;
  std::vector<double> w(static_cast<std::size_t>(size) * size);
  for (int i = -r; i <= r; ++i) {
    for (int j = -r; j <= r; ++j) {
      w[static_cast<std::size_t>(i + r) * size + (j + r)] =
          std::exp(-(i * i + j * j) / (2.0 * sigma * sigma));
    }
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return Kernel(size, std::move(w));
}

Kernel box_kernel(int size) {
  const auto n = static_cast<std::size_t>(size) * size;
  return Kernel(size, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

namespace {

struct Gradients {
  GrayImage magnitude;
  std::vector<std::uint8_t> sector;  // 0: horizontal, 1: 45deg, 2: vertical, 3: 135deg
};

Gradients sobel(const GrayImage& img) {
  const int h = img.height();
  const int w = img.width();
  auto px = [&](int y, int x) { return img.at(std::clamp(y, 0, h - 1), std::clamp(x, 0, w - 1)); };
  Gradients g{GrayImage(h, w), std::vector<std::uint8_t>(static_cast<std::size_t>(h) * w)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = (px(y - 1, x + 1) + 2 * px(y, x + 1) + px(y + 1, x + 1)) -
                        (px(y - 1, x - 1) + 2 * px(y, x - 1) + px(y + 1, x - 1));
      const double gy = (px(y + 1, x - 1) + 2 * px(y + 1, x) + px(y + 1, x + 1)) -
                        (px(y - 1, x - 1) + 2 * px(y - 1, x) + px(y - 1, x + 1));
      g.magnitude.at(y, x) = std::hypot(gx, gy);
      double angle = std::atan2(gy, gx) * 180.0 / M_PI;
      if (angle < 0) angle += 180.0;
      std::uint8_t s = 0;
      if (angle >= 22.5 && angle < 67.5) {
        s = 1;
      } else if (angle >= 67.5 && angle < 112.5) {
        s = 2;
      } else if (angle >= 112.5 && angle < 157.5) {
        s = 3;
      }
      g.sector[static_cast<std::size_t>(y) * w + x] = s;
    }
  }
  return g;
}

Kernel smoothing_kernel(double sigma) {
  return gaussian_kernel(2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1, sigma);
}

EdgeMap canny_on_gradients(const Gradients& g, double low, double high) {
  const int h = g.magnitude.height();
  const int w = g.magnitude.width();
  auto mag = [&](int y, int x) {
    if (y < 0 || y >= h || x < 0 || x >= w) return 0.0;
    return g.magnitude.at(y, x);
  };
  // Neighbour offsets along the gradient direction for each sector.
  static constexpr int dy[4] = {0, 1, 1, 1};
  static constexpr int dx[4] = {1, 1, 0, -1};

  std::vector<std::uint8_t> state(static_cast<std::size_t>(h) * w, 0);  // 1 weak, 2 strong
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double m = mag(y, x);
      if (m <= 0.0 || m < low) continue;
      const int s = g.sector[static_cast<std::size_t>(y) * w + x];
      // Strict on one side, non-strict on the other: plateaus of equal
      // magnitude keep exactly one pixel.
      const bool is_max = m > mag(y - dy[s], x - dx[s]) && m >= mag(y + dy[s], x + dx[s]);
      if (!is_max) continue;
      state[static_cast<std::size_t>(y) * w + x] = m >= high ? 2 : 1;
    }
  }

  EdgeMap edges{h, w, std::vector<std::uint8_t>(static_cast<std::size_t>(h) * w, 0)};
  std::vector<int> stack;
  for (int i = 0; i < h * w; ++i) {
    if (state[i] == 2) {
      edges.data[i] = 1;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    const int y = i / w;
    const int x = i % w;
    for (int oy = -1; oy <= 1; ++oy) {
      for (int ox = -1; ox <= 1; ++ox) {
        const int ny = y + oy;
        const int nx = x + ox;
        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
        const int j = ny * w + nx;
        if (state[j] == 1 && !edges.data[j]) {
          edges.data[j] = 1;
          stack.push_back(j);
        }
      }
    }
  }
  return edges;
}

}  // namespace

EdgeMap canny(const GrayImage& img, double sigma, double low, double high) {
  if (!(sigma > 0.0)) throw std::invalid_argument("canny: sigma must be positive");
  if (!(low >= 0.0 && low < high)) throw std::invalid_argument("canny: require 0 <= low < high");
  return canny_on_gradients(sobel(convolve_replicate(img, smoothing_kernel(sigma))), low, high);
}

EdgeMap canny_relative(const GrayImage& img, double sigma, double low_ratio, double high_ratio) {
  if (!(sigma > 0.0)) throw std::invalid_argument("canny: sigma must be positive");
  if (!(low_ratio >= 0.0 && low_ratio < high_ratio)) {
    throw std::invalid_argument("canny: require 0 <= low < high");
  }
  const Gradients g = sobel(convolve_replicate(img, smoothing_kernel(sigma)));
  const auto mags = g.magnitude.data();
  const double gmax = mags.empty() ? 0.0 : *std::max_element(mags.begin(), mags.end());
  // Smoothing leaves ~1e-13 residue on flat images.
  if (gmax <= 1e-9) {
    return EdgeMap{img.height(), img.width(), std::vector<std::uint8_t>(img.size(), 0)};
  }
  return canny_on_gradients(g, low_ratio * gmax, high_ratio * gmax);
}

}  // namespace jndadv
