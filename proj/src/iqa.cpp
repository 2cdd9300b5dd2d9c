#include "jndadv/iqa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace jndadv {

namespace {

void require_same_shape(const GrayImage& a, const GrayImage& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw std::invalid_argument("IQA: image shapes differ");
  }
}

GrayImage luma(const ImageTensor& img) { return to_grayscale(img); }

std::vector<double> gaussian_window_1d(const SsimParams& p) {
  std::vector<double> w(static_cast<std::size_t>(p.window));
  const int r = p.window / 2;
  double total = 0.0;
  for (int i = 0; i < p.window; ++i) {
    w[i] = std::exp(-((i - r) * (i - r)) / (2.0 * p.sigma * p.sigma));
    total += w[i];
  }
  for (double& v : w) v /= total;
  return w;
}

// Separable "valid" filtering: output is (h - k + 1) x (w - k + 1).
std::vector<double> filter_valid(const std::vector<double>& img, int h, int w,
                                 const std::vector<double>& k1d) {
  const int k = static_cast<int>(k1d.size());
  const int oh = h - k + 1;
  const int ow = w - k + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * ow, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int j = 0; j < k; ++j) acc += k1d[j] * img[static_cast<std::size_t>(y) * w + x + j];
      rows[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow, 0.0);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += k1d[i] * rows[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

struct SsimTerms {
  double ssim;  // mean of l * cs
  double cs;    // mean of cs
};

SsimTerms ssim_terms(const GrayImage& a, const GrayImage& b, const SsimParams& p) {
  require_same_shape(a, b);
  const int h = a.height();
  const int w = a.width();
  if (h < p.window || w < p.window) throw std::invalid_argument("SSIM: image smaller than window");
  const std::vector<double> k1d = gaussian_window_1d(p);
  std::vector<double> xa(a.data().begin(), a.data().end());
  std::vector<double> xb(b.data().begin(), b.data().end());
  std::vector<double> aa(xa.size()), bb(xa.size()), ab(xa.size());
  for (std::size_t i = 0; i < xa.size(); ++i) {
    aa[i] = xa[i] * xa[i];
    bb[i] = xb[i] * xb[i];
    ab[i] = xa[i] * xb[i];
  }
  const auto mu_a = filter_valid(xa, h, w, k1d);
  const auto mu_b = filter_valid(xb, h, w, k1d);
  const auto s_aa = filter_valid(aa, h, w, k1d);
  const auto s_bb = filter_valid(bb, h, w, k1d);
  const auto s_ab = filter_valid(ab, h, w, k1d);
  const double c1 = (p.k1 * p.range) * (p.k1 * p.range);
  const double c2 = (p.k2 * p.range) * (p.k2 * p.range);
  double sum_ssim = 0.0;
  double sum_cs = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double va = s_aa[i] - mu_a[i] * mu_a[i];
    const double vb = s_bb[i] - mu_b[i] * mu_b[i];
    const double cov = s_ab[i] - mu_a[i] * mu_b[i];
    const double l = (2 * mu_a[i] * mu_b[i] + c1) / (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1);
    const double cs = (2 * cov + c2) / (va + vb + c2);
    sum_ssim += l * cs;
    sum_cs += cs;
  }
  const auto n = static_cast<double>(mu_a.size());
  return {sum_ssim / n, sum_cs / n};
}

GrayImage downsample2(const GrayImage& img) {
  const int h = img.height() / 2;
  const int w = img.width() / 2;
  GrayImage out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out.at(y, x) = 0.25 * (img.at(2 * y, 2 * x) + img.at(2 * y, 2 * x + 1) + img.at(2 * y + 1, 2 * x) +
                             img.at(2 * y + 1, 2 * x + 1));
    }
  }
  return out;
}

}  // namespace

double psnr(const GrayImage& ref, const GrayImage& test) {
  require_same_shape(ref, test);
  double mse = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = ref[i] - test[i];
    mse += d * d;
  }
  mse /= static_cast<double>(ref.size());
  if (mse < 255.0 * 255.0 * std::pow(10.0, -9.9)) return kPsnrCap;
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double psnr(const ImageTensor& ref, const ImageTensor& test) {
  if (ref.shape() != test.shape()) throw std::invalid_argument("IQA: image shapes differ");
  return psnr(luma(ref), luma(test));
}

double ssim(const GrayImage& ref, const GrayImage& test, const SsimParams& params) {
  return ssim_terms(ref, test, params).ssim;
}

double ssim(const ImageTensor& ref, const ImageTensor& test, const SsimParams& params) {
  if (ref.shape() != test.shape()) throw std::invalid_argument("IQA: image shapes differ");
  return ssim(luma(ref), luma(test), params);
}

int ms_ssim3_min_size(const SsimParams& params) { return params.window << (kMsSsimScales - 1); }

double ms_ssim3(const GrayImage& ref, const GrayImage& test, const SsimParams& params) {
  require_same_shape(ref, test);
  const int min_size = ms_ssim3_min_size(params);
  if (ref.height() < min_size || ref.width() < min_size) {
    throw std::invalid_argument("MS-SSIM: image must be at least " + std::to_string(min_size) + " pixels per side");
  }
  constexpr double weight = 1.0 / kMsSsimScales;
  GrayImage a = ref;
  GrayImage b = test;
  double result = 1.0;
  for (int scale = 0; scale < kMsSsimScales; ++scale) {
    const SsimTerms terms = ssim_terms(a, b, params);
    const double term = scale + 1 == kMsSsimScales ? terms.ssim : terms.cs;
    result *= std::pow(std::max(term, 0.0), weight);
    if (scale + 1 < kMsSsimScales) {
      a = downsample2(a);
      b = downsample2(b);
    }
  }
  return result;
}

double ms_ssim3(const ImageTensor& ref, const ImageTensor& test, const SsimParams& params) {
  if (ref.shape() != test.shape()) throw std::invalid_argument("IQA: image shapes differ");
  return ms_ssim3(luma(ref), luma(test), params);
}

IqaScore evaluate_quality(const ImageTensor& ref, const ImageTensor& test) {
  if (ref.shape() != test.shape()) throw std::invalid_argument("IQA: image shapes differ");
  const GrayImage a = luma(ref);
  const GrayImage b = luma(test);
  IqaScore s;
  s.psnr = psnr(a, b);
  s.ssim = ssim(a, b);
  const int min_size = ms_ssim3_min_size();
  s.ms_ssim3 = (a.height() >= min_size && a.width() >= min_size) ? ms_ssim3(a, b)
                                                                  : std::numeric_limits<double>::quiet_NaN();
  return s;
}

}  // namespace jndadv
