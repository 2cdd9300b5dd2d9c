#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "jndadv/iqa.hpp"
#include "jndadv/toy_dataset.hpp"
#include "test_util.hpp"

using namespace jndadv;

namespace {

// Direct windowed statistics with a full 2-D Gaussian and two-pass moments.
struct OracleTerms {
  double ssim = 0.0, cs = 0.0;
};

OracleTerms ssim_oracle(const GrayImage& a, const GrayImage& b, int win = 11, double sigma = 1.5) {
  const int r = win / 2;
  std::vector<double> w(win * win);
  double total = 0.0;
  for (int i = 0; i < win; ++i)
    for (int j = 0; j < win; ++j) total += w[i * win + j] = std::exp(-((i - r) * (i - r) + (j - r) * (j - r)) / (2 * sigma * sigma));
  for (double& v : w) v /= total;
  const double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);
  OracleTerms t;
  int count = 0;
  for (int y = 0; y + win <= a.height(); ++y) {
    for (int x = 0; x + win <= a.width(); ++x) {
      double ma = 0, mb = 0;
      for (int i = 0; i < win; ++i)
        for (int j = 0; j < win; ++j) {
          ma += w[i * win + j] * a.at(y + i, x + j);
          mb += w[i * win + j] * b.at(y + i, x + j);
        }
      double va = 0, vb = 0, cov = 0;
      for (int i = 0; i < win; ++i)
        for (int j = 0; j < win; ++j) {
          const double da = a.at(y + i, x + j) - ma, db = b.at(y + i, x + j) - mb;
          va += w[i * win + j] * da * da;
          vb += w[i * win + j] * db * db;
          cov += w[i * win + j] * da * db;
        }
      const double l = (2 * ma * mb + c1) / (ma * ma + mb * mb + c1);
      const double cs = (2 * cov + c2) / (va + vb + c2);
      t.ssim += l * cs;
      t.cs += cs;
      ++count;
    }
  }
  t.ssim /= count;
  t.cs /= count;
  return t;
}

GrayImage half(const GrayImage& img) {
  GrayImage out(img.height() / 2, img.width() / 2);
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x)
      out.at(y, x) = (img.at(2 * y, 2 * x) + img.at(2 * y + 1, 2 * x) + img.at(2 * y, 2 * x + 1) +
                      img.at(2 * y + 1, 2 * x + 1)) / 4;
  return out;
}

double ms_ssim_oracle(GrayImage a, GrayImage b) {
  const double c0 = ssim_oracle(a, b).cs;
  a = half(a), b = half(b);
  const double c1 = ssim_oracle(a, b).cs;
  a = half(a), b = half(b);
  const double s2 = ssim_oracle(a, b).ssim;
  return std::cbrt(std::max(c0, 0.0)) * std::cbrt(std::max(c1, 0.0)) * std::cbrt(std::max(s2, 0.0));
}

GrayImage textured(int n, std::uint64_t seed) {
  ToyDatasetOptions o;
  o.size = n;
  o.channels = 1;
  return to_grayscale(make_toy_image(1, seed, o));
}

}  // namespace

TEST(Psnr, IdenticalIsCapped) {
  const ImageTensor x = testutil::random_image(16, 16, 3, 1);
  EXPECT_EQ(psnr(x, x), kPsnrCap);
  EXPECT_EQ(psnr(to_grayscale(x), to_grayscale(x)), 99.0);
}

TEST(Psnr, ConstantOffset) {
  const GrayImage a = testutil::random_gray(12, 12, 2, 20.0, 200.0);
  GrayImage b = a;
  for (double& v : b.data()) v += 16.0;
  EXPECT_NEAR(psnr(a, b), 10.0 * std::log10(255.0 * 255.0 / 256.0), 1e-12);
  EXPECT_NEAR(psnr(a, b), 24.05, 0.01);
}

TEST(Psnr, UsesLuma) {
  // A change in blue only moves luma by 0.114 of the offset.
  const ImageTensor a(8, 8, 3, 100.0);
  ImageTensor b = a;
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) b.at(y, x, 2) += 10.0;
  EXPECT_NEAR(psnr(a, b), 10.0 * std::log10(255.0 * 255.0 / std::pow(1.14, 2)), 1e-9);
}

TEST(Psnr, Symmetric) {
  const GrayImage a = testutil::random_gray(9, 9, 3), b = testutil::random_gray(9, 9, 4);
  EXPECT_DOUBLE_EQ(psnr(a, b), psnr(b, a));
  EXPECT_THROW(psnr(a, GrayImage(9, 8)), std::invalid_argument);
}

TEST(Ssim, IdenticalIsOne) {
  const GrayImage a = testutil::random_gray(20, 24, 5);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
  const GrayImage big = textured(48, 3);
  EXPECT_NEAR(ms_ssim3(big, big), 1.0, 1e-12);
}

TEST(Ssim, MatchesDirectOracle) {
  const GrayImage a = testutil::random_gray(17, 19, 6);
  GrayImage b = a;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 12.0);
  for (double& v : b.data()) v += n(rng);
  EXPECT_NEAR(ssim(a, b), ssim_oracle(a, b).ssim, 1e-10);
  EXPECT_NEAR(ssim(b, a), ssim(a, b), 1e-12);
}

TEST(Ssim, InvertedImageIsNegative) {
  const GrayImage a = textured(32, 4);
  GrayImage b = a;
  for (double& v : b.data()) v = 255.0 - v;
  EXPECT_LT(ssim(a, b), 0.0);
}

TEST(Ssim, DecreasesWithNoise) {
  const GrayImage a = textured(32, 5);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  GrayImage noise(32, 32);
  for (double& v : noise.data()) v = n(rng);
  double prev = 1.0;
  for (double s : {1.0, 3.0, 6.0, 12.0, 24.0}) {
    GrayImage b = a;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += s * noise[i];
    const double q = ssim(a, b);
    EXPECT_LT(q, prev);
    prev = q;
  }
}

TEST(Ssim, TooSmall) {
  EXPECT_THROW(ssim(GrayImage(10, 20), GrayImage(10, 20)), std::invalid_argument);
  EXPECT_THROW(ssim(GrayImage(12, 12), GrayImage(12, 13)), std::invalid_argument);
}

TEST(MsSsim, MatchesDirectOracle) {
  const GrayImage a = textured(48, 9);
  GrayImage b = a;
  std::mt19937_64 rng(10);
  std::normal_distribution<double> n(0.0, 8.0);
  for (double& v : b.data()) v += n(rng);
  EXPECT_NEAR(ms_ssim3(a, b), ms_ssim_oracle(a, b), 1e-10);
}

TEST(MsSsim, ShiftRanksAboveNoiseAtEqualMse) {
  // A global shift only touches the coarsest luminance term; noise of the
  // same energy hurts the structure term at every scale.
  const GrayImage a = textured(64, 11);
  GrayImage shifted = a, noisy = a;
  for (double& v : shifted.data()) v += 10.0;
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> coin(0, 1);
  for (double& v : noisy.data()) v += coin(rng) ? 10.0 : -10.0;
  EXPECT_NEAR(psnr(a, noisy), psnr(a, shifted), 1e-9);
  EXPECT_GT(ms_ssim3(a, shifted), ms_ssim3(a, noisy));
  EXPECT_GT(ms_ssim3(a, shifted), 0.99);
}

TEST(MsSsim, SizeLimits) {
  EXPECT_EQ(ms_ssim3_min_size(), 44);
  EXPECT_THROW(ms_ssim3(GrayImage(43, 60), GrayImage(43, 60)), std::invalid_argument);
  EXPECT_NO_THROW(ms_ssim3(GrayImage(44, 44, 3.0), GrayImage(44, 44, 3.0)));
}

TEST(EvaluateQuality, SmallImagesReportNanMsSsim) {
  const ImageTensor a = testutil::random_image(32, 32, 3, 13);
  ImageTensor b = a;
  b[0] += 5.0;
  const IqaScore s = evaluate_quality(a, b);
  EXPECT_TRUE(std::isnan(s.ms_ssim3));
  EXPECT_DOUBLE_EQ(s.psnr, psnr(a, b));
  EXPECT_DOUBLE_EQ(s.ssim, ssim(a, b));
}

TEST(EvaluateQuality, LargeImages) {
  const ImageTensor a = from_gray(textured(48, 14));
  const IqaScore s = evaluate_quality(a, a);
  EXPECT_EQ(s.psnr, 99.0);
  EXPECT_NEAR(s.ssim, 1.0, 1e-12);
  EXPECT_NEAR(s.ms_ssim3, 1.0, 1e-12);
  EXPECT_THROW(evaluate_quality(a, ImageTensor(48, 40, 1)), std::invalid_argument);
}
