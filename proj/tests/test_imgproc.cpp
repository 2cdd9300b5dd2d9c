#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "jndadv/imgproc.hpp"
#include "test_util.hpp"

using namespace jndadv;

namespace {

// Appendix matrices typed in again, unscaled.
constexpr double kH[4][5][5] = {
    {{0, 0, 0, 0, 0}, {1, 3, 8, 3, 1}, {0, 0, 0, 0, 0}, {-1, -3, -8, -3, -1}, {0, 0, 0, 0, 0}},
    {{0, 0, 1, 0, 0}, {0, 8, 3, 0, 0}, {1, 3, 0, -3, -1}, {0, 0, -3, -8, 0}, {0, 0, -1, 0, 0}},
    {{0, 0, 1, 0, 0}, {0, 0, 3, 8, 0}, {-1, -3, 0, 3, 1}, {0, -8, -3, 0, 0}, {0, 0, -1, 0, 0}},
    {{0, 1, 0, -1, 0}, {0, 3, 0, -3, 0}, {0, 8, 0, -8, 0}, {0, 3, 0, -3, 0}, {0, 1, 0, -1, 0}},
};

// out(y,x) = sum_{i,j} k[i][j] * img(y + 2 - i, x + 2 - j), borders replicated.
double brute_conv5(const GrayImage& img, const double k[5][5], double scale, int y, int x) {
  double acc = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      int sy = y + 2 - i, sx = x + 2 - j;
      sy = sy < 0 ? 0 : (sy >= img.height() ? img.height() - 1 : sy);
      sx = sx < 0 ? 0 : (sx >= img.width() ? img.width() - 1 : sx);
      acc += k[i][j] * scale * img.at(sy, sx);
    }
  }
  return acc;
}

}  // namespace

TEST(Convolve, IdentityKernel) {
  const GrayImage img = testutil::random_gray(6, 7, 3);
  EXPECT_EQ(convolve2d(img, Kernel(1, {1.0})), img);
}

TEST(Convolve, ZeroSumFilterOnConstant) {
  const GrayImage img(9, 9, 93.0);
  for (const Kernel& h : directional_filter_bank()) {
    for (const auto r = convolve2d(img, h); double v : r.data()) EXPECT_NEAR(v, 0.0, 1e-12);
  }
}

TEST(Convolve, RampMatchesBruteForce) {
  GrayImage ramp(5, 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) ramp.at(y, x) = 10.0 * x + 3.0 * y * y;
  const auto bank = directional_filter_bank();
  for (int k = 0; k < 4; ++k) {
    const GrayImage out = convolve2d(ramp, bank[k]);
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x) EXPECT_NEAR(out.at(y, x), brute_conv5(ramp, kH[k], 1.0 / 16, y, x), 1e-12);
  }
}

TEST(Convolve, FlipsTheKernel) {
  // A single tap at (2,2) shifts the image towards +y,+x.
  std::vector<double> w(9, 0.0);
  w[8] = 1.0;
  GrayImage img(3, 3);
  img.at(0, 0) = 5.0;
  const GrayImage out = convolve2d(img, Kernel(3, w));
  EXPECT_EQ(out.at(1, 1), 5.0);
  EXPECT_EQ(out.at(0, 0), 5.0);  // replicated border
  EXPECT_EQ(out.at(2, 2), 0.0);
}

TEST(Convolve, Linear) {
  const GrayImage a = testutil::random_gray(8, 8, 1), b = testutil::random_gray(8, 8, 2);
  GrayImage mix(8, 8);
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 2.0 * a[i] - 0.5 * b[i];
  const Kernel k = directional_filter_bank()[1];
  const GrayImage ca = convolve2d(a, k), cb = convolve2d(b, k), cm = convolve2d(mix, k);
  for (std::size_t i = 0; i < mix.size(); ++i) EXPECT_NEAR(cm[i], 2.0 * ca[i] - 0.5 * cb[i], 1e-9);
}

TEST(Convolve, KernelLargerThanImage) {
  EXPECT_THROW(convolve2d(GrayImage(4, 9), directional_filter_bank()[0]), std::invalid_argument);
}

TEST(FilterBank, AppendixValues) {
  const auto bank = directional_filter_bank();
  EXPECT_DOUBLE_EQ(bank[0].at(1, 2), 0.5);
  EXPECT_DOUBLE_EQ(bank[3].at(2, 1), 0.5);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(bank[k].size(), 5);
    EXPECT_NEAR(bank[k].sum(), 0.0, 1e-15);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) EXPECT_DOUBLE_EQ(bank[k].at(i, j), kH[k][i][j] / 16.0);
  }
}

TEST(Gaussian, ThreeByThreeHalfSigma) {
  const double e1 = std::exp(-2.0), e2 = std::exp(-4.0);
  const double total = 1.0 + 4.0 * e1 + 4.0 * e2;
  const Kernel g = gaussian_kernel(3, 0.5);
  EXPECT_NEAR(g.at(1, 1), 1.0 / total, 1e-15);
  EXPECT_NEAR(g.at(0, 1), e1 / total, 1e-15);
  EXPECT_NEAR(g.at(0, 0), e2 / total, 1e-15);
  EXPECT_NEAR(g.at(1, 1), 0.6193, 1e-4);
  EXPECT_NEAR(g.at(1, 0), 0.0838, 1e-4);
  EXPECT_NEAR(g.at(2, 2), 0.0113, 1e-4);
}

TEST(Gaussian, NormalizedPositiveIsotropic) {
  EXPECT_EQ(gaussian_kernel(1, 2.0).weights(), std::vector<double>{1.0});
  for (int size : {3, 5, 7, 11}) {
    for (double sigma : {0.5, 1.0, 1.5, 3.0}) {
      const Kernel g = gaussian_kernel(size, sigma);
      EXPECT_NEAR(g.sum(), 1.0, 1e-12);
      for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
          EXPECT_GT(g.at(i, j), 0.0);
          EXPECT_DOUBLE_EQ(g.at(i, j), g.at(j, size - 1 - i));  // 90 degree rotation
        }
      }
    }
  }
  EXPECT_THROW(gaussian_kernel(4, 1.0), std::invalid_argument);
  EXPECT_THROW(gaussian_kernel(3, 0.0), std::invalid_argument);
}

TEST(Canny, ConstantImageHasNoEdges) {
  const EdgeMap e = canny_relative(GrayImage(16, 16, 80.0));
  EXPECT_EQ(std::accumulate(e.data.begin(), e.data.end(), 0), 0);
  const EdgeMap a = canny(GrayImage(16, 16, 80.0), 1.0, 1.0, 2.0);
  EXPECT_EQ(std::accumulate(a.data.begin(), a.data.end(), 0), 0);
}

TEST(Canny, VerticalStepGivesOneColumn) {
  GrayImage step(16, 16, 0.0);
  for (int y = 0; y < 16; ++y)
    for (int x = 8; x < 16; ++x) step.at(y, x) = 255.0;
  const EdgeMap e = canny_relative(step);
  int column = -1;
  for (int y = 0; y < 16; ++y) {
    int count = 0;
    for (int x = 0; x < 16; ++x) {
      if (e.at(y, x)) {
        ++count;
        if (column < 0) column = x;
        EXPECT_EQ(x, column) << "row " << y;
      }
    }
    EXPECT_EQ(count, 1) << "row " << y;
  }
  EXPECT_TRUE(column == 7 || column == 8) << column;
}

TEST(Canny, BinaryAndShiftInvariant) {
  const GrayImage img = testutil::random_gray(24, 20, 9, 20.0, 200.0);
  GrayImage shifted = img;
  for (double& v : shifted.data()) v += 37.0;
  const EdgeMap a = canny_relative(img), b = canny_relative(shifted);
  for (auto v : a.data) EXPECT_TRUE(v == 0 || v == 1);
  EXPECT_EQ(a.data, b.data);
  EXPECT_GT(std::accumulate(a.data.begin(), a.data.end(), 0), 0);
}

TEST(Canny, ThresholdOrdering) {
  EXPECT_THROW(canny(GrayImage(8, 8), 1.0, 5.0, 2.0), std::invalid_argument);
  EXPECT_THROW(canny(GrayImage(8, 8), 1.0, -1.0, 2.0), std::invalid_argument);
}

TEST(Canny, HysteresisKeepsConnectedWeakPixels) {
  // A step whose contrast fades along the edge: the strong top part pulls
  // the weaker lower part in, while an isolated weak edge stays out.
  GrayImage img(20, 20, 0.0);
  for (int y = 0; y < 20; ++y)
    for (int x = 10; x < 20; ++x) img.at(y, x) = y < 10 ? 200.0 : 60.0;
  const EdgeMap relaxed = canny_relative(img, 1.0, 0.1, 0.3);
  const EdgeMap strict = canny_relative(img, 1.0, 0.5, 0.9);
  int relaxed_rows = 0, strict_rows = 0;
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) {
      relaxed_rows += relaxed.at(y, x) && y >= 14;
      strict_rows += strict.at(y, x) && y >= 14;
    }
  }
  EXPECT_GT(relaxed_rows, 0);
  EXPECT_EQ(strict_rows, 0);
}
