#pragma once

#include "jndadv/tensor.hpp"

namespace jndadv {

// Overlap factor between texture masking and luminance adaptation.
inline constexpr double kMaskingOverlap = 0.3;

// Weight applied to Canny edge pixels before low-pass smoothing; other
// pixels get weight 1. Structurally salient edges keep small budgets.
inline constexpr double kEdgeWeight = 0.1;

// Side of the mean filter that estimates background luminance.
inline constexpr int kBackgroundWindow = 5;

struct SpatialJnd {
  GrayImage texture;    // TM
  GrayImage luminance;  // LA
  GrayImage threshold;  // JND_s = TM + LA - C * min(TM, LA)
};

GrayImage edge_protection_weight(const GrayImage& img);
GrayImage texture_masking(const GrayImage& img);

// Luminance adaptation threshold for a background luminance value.
double luminance_threshold(double background);
GrayImage luminance_adaptation(const GrayImage& img);

double combine_masking(double texture, double luminance);

SpatialJnd spatial_jnd_components(const GrayImage& img);
GrayImage spatial_jnd(const GrayImage& img);

}  // namespace jndadv
