#pragma once

#include "jndadv/tensor.hpp"

namespace jndadv {

// All metrics compare the BT.601 luma of color inputs.

inline constexpr double kPsnrCap = 99.0;

struct IqaScore {
  double psnr = 0.0;
  double ssim = 0.0;
  double ms_ssim3 = 0.0;  // NaN when the image is too small for three scales
};

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double range = 255.0;
};

double psnr(const ImageTensor& ref, const ImageTensor& test);
double psnr(const GrayImage& ref, const GrayImage& test);

// Mean SSIM over all window positions that fit inside the image.
double ssim(const ImageTensor& ref, const ImageTensor& test, const SsimParams& params = {});
double ssim(const GrayImage& ref, const GrayImage& test, const SsimParams& params = {});

// Three-scale MS-SSIM with equal weights 1/3: contrast-structure terms at
// every scale, luminance at the coarsest, 2x2 mean downsampling.
inline constexpr int kMsSsimScales = 3;
int ms_ssim3_min_size(const SsimParams& params = {});
double ms_ssim3(const ImageTensor& ref, const ImageTensor& test, const SsimParams& params = {});
double ms_ssim3(const GrayImage& ref, const GrayImage& test, const SsimParams& params = {});

// ms_ssim3 is reported as NaN for images smaller than ms_ssim3_min_size().
IqaScore evaluate_quality(const ImageTensor& ref, const ImageTensor& test);

}  // namespace jndadv
