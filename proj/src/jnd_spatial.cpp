#include "jndadv/jnd_spatial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jndadv/imgproc.hpp"

namespace jndadv {

namespace {

void require_filter_support(const GrayImage& img) {
  if (img.height() < 5 || img.width() < 5) {
    throw std::invalid_argument("spatial JND: image must be at least 5x5");
  }
}

}  // namespace

GrayImage edge_protection_weight(const GrayImage& img) {
  const EdgeMap edges = canny_relative(img);
  GrayImage weight(img.height(), img.width(), 1.0);
  for (std::size_t i = 0; i < weight.size(); ++i) {
    if (edges.data[i]) weight[i] = kEdgeWeight;
  }
  return convolve2d(weight, gaussian_kernel(3, 0.5));
}

GrayImage texture_masking(const GrayImage& img) {
  require_filter_support(img);
  GrayImage tm(img.height(), img.width(), 0.0);
  for (const Kernel& h : directional_filter_bank()) {
    const GrayImage response = convolve2d(img, h);
    for (std::size_t i = 0; i < tm.size(); ++i) tm[i] = std::max(tm[i], std::abs(response[i]));
  }
  const GrayImage weight = edge_protection_weight(img);
  for (std::size_t i = 0; i < tm.size(); ++i) tm[i] *= weight[i];
  return tm;
}

double luminance_threshold(double background) {
  if (background <= 127.0) return 17.0 * (1.0 - std::sqrt(std::max(background, 0.0) / 127.0));
  return 3.0 * (background - 127.0) / 128.0 + 3.0;
}

GrayImage luminance_adaptation(const GrayImage& img) {
  // Images smaller than the window fall back to the largest odd window that fits.
  int side = std::min({kBackgroundWindow, img.height(), img.width()});
  if (side % 2 == 0) --side;
  GrayImage la = convolve2d(img, box_kernel(side));
  for (double& v : la.data()) v = luminance_threshold(v);
  return la;
}

double combine_masking(double texture, double luminance) {
  return texture + luminance - kMaskingOverlap * std::min(texture, luminance);
}

SpatialJnd spatial_jnd_components(const GrayImage& img) {
  require_filter_support(img);
  SpatialJnd out{texture_masking(img), luminance_adaptation(img), GrayImage(img.height(), img.width())};
  for (std::size_t i = 0; i < img.size(); ++i) {
    out.threshold[i] = combine_masking(out.texture[i], out.luminance[i]);
  }
  return out;
}

GrayImage spatial_jnd(const GrayImage& img) { return spatial_jnd_components(img).threshold; }

}  // namespace jndadv
