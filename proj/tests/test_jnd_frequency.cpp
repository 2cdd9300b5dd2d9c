#include <gtest/gtest.h>

#include <cmath>

#include "jndadv/jnd_frequency.hpp"
#include "test_util.hpp"

using namespace jndadv;

namespace {

double phi(int k, int b) { return k == 0 ? std::sqrt(1.0 / b) : std::sqrt(2.0 / b); }

double base_oracle(int u, int v, int b) {
  const double w = std::sqrt(double(u * u + v * v)) / (2.0 * b);
  return 0.25 / (phi(u, b) * phi(v, b)) * std::exp(11.0 * w) / (1.33 + 0.11 * w);
}

// Independent map: naive DCT per block with the textbook formula.
double naive_dct(const GrayImage& img, int y0, int x0, int u, int v, int b) {
  double acc = 0.0;
  for (int y = 0; y < b; ++y) {
    for (int x = 0; x < b; ++x) {
      acc += img.at(y0 + y, x0 + x) * std::cos((2 * y + 1) * u * M_PI / (2.0 * b)) *
             std::cos((2 * x + 1) * v * M_PI / (2.0 * b));
    }
  }
  return phi(u, b) * phi(v, b) * acc;
}

}  // namespace

TEST(Csf, MatchesFormulaAndSymmetric) {
  const DctBasis d(8);
  const std::vector<double> t = csf_base_threshold(d);
  for (int u = 0; u < 8; ++u) {
    for (int v = 0; v < 8; ++v) {
      EXPECT_NEAR(t[u * 8 + v], base_oracle(u, v, 8), 1e-12);
      EXPECT_EQ(t[u * 8 + v], t[v * 8 + u]);
      EXPECT_GT(t[u * 8 + v], 0.0);
    }
  }
  EXPECT_LT(t[0 * 8 + 1], t[0 * 8 + 7]);
}

TEST(ContrastMasking, Examples) {
  EXPECT_EQ(contrast_masking(0.0, 3.0), 1.0);
  EXPECT_EQ(contrast_masking(3.0, 3.0), 1.0);
  EXPECT_EQ(contrast_masking(-1.5, 3.0), 1.0);
  EXPECT_NEAR(contrast_masking(32.0 * 3.0, 3.0), std::pow(32.0, 0.6), 1e-12);
  EXPECT_NEAR(contrast_masking(-96.0, 3.0), 8.0, 1e-9);
  EXPECT_THROW(contrast_masking(1.0, 0.0), std::invalid_argument);
}

TEST(FrequencyJnd, FlatImageIsBase) {
  const DctBasis d(8);
  const JndMapF j = frequency_jnd(GrayImage(16, 24, 180.0), d);
  const std::vector<double> t = csf_base_threshold(d);
  for (int by = 0; by < 2; ++by)
    for (int bx = 0; bx < 3; ++bx)
      for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) EXPECT_NEAR(j.at(by, bx, u, v), t[u * 8 + v], 1e-9);
}

TEST(FrequencyJnd, MatchesIndependentOracle) {
  const int b = 8;
  const GrayImage img = testutil::random_gray(16, 16, 12);
  const JndMapF j = frequency_jnd(img, DctBasis(b));
  for (int by = 0; by < 2; ++by) {
    for (int bx = 0; bx < 2; ++bx) {
      for (int u = 0; u < b; ++u) {
        for (int v = 0; v < b; ++v) {
          const double t = base_oracle(u, v, b);
          const double c = naive_dct(img, by * b, bx * b, u, v, b);
          const double factor = (u == 0 && v == 0) ? 1.0 : std::max(1.0, std::pow(std::abs(c) / t, 0.6));
          EXPECT_NEAR(j.at(by, bx, u, v), t * factor, 1e-9 * t * factor);
        }
      }
    }
  }
}

TEST(FrequencyJnd, TexturedBlockRaisesThresholds) {
  const DctBasis d(8);
  GrayImage img(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) img.at(y, x) = (x + y) % 2 ? 250.0 : 5.0;
  const JndMapF j = frequency_jnd(img, d);
  const BlockSpectrum X = block_dct(img, d);
  const std::vector<double> t = csf_base_threshold(d);
  int raised = 0;
  for (int k = 1; k < 64; ++k) {
    EXPECT_GE(j.spectrum()[k], t[k]);
    if (std::abs(X[k]) > t[k]) {
      EXPECT_GT(j.spectrum()[k], t[k]);
      ++raised;
    }
  }
  EXPECT_GT(raised, 0);
}

TEST(FrequencyJnd, AtLeastBaseAndMonotone) {
  const DctBasis d(8);
  const std::vector<double> t = csf_base_threshold(d);
  const GrayImage img = testutil::random_gray(24, 16, 3);
  const JndMapF j = frequency_jnd(img, d);
  for (int by = 0; by < j.blocks_y(); ++by)
    for (int bx = 0; bx < j.blocks_x(); ++bx)
      for (int k = 0; k < 64; ++k) EXPECT_GE(j.at(by, bx, k / 8, k % 8), t[k]);
  double prev = 0.0;
  for (double c = 0.0; c < 4000.0; c += 50.0) {
    const double f = t[9] * contrast_masking(c, t[9]);
    EXPECT_GE(f, prev);
    prev = f;
  }
}

TEST(FrequencyJnd, ConstantImageSameAcrossBlocks) {
  const JndMapF j = frequency_jnd(GrayImage(32, 32, 77.0), DctBasis(8));
  for (int by = 0; by < 4; ++by)
    for (int bx = 0; bx < 4; ++bx)
      for (int k = 0; k < 64; ++k) EXPECT_EQ(j.at(by, bx, k / 8, k % 8), j.at(0, 0, k / 8, k % 8));
}

TEST(FrequencyJnd, ReplicatedLayout) {
  const JndMapF j = frequency_jnd(testutil::random_gray(16, 8, 1), DctBasis(8));
  const BlockSpectrum r = j.replicated(3);
  EXPECT_EQ(r.channels(), 3);
  for (int c = 0; c < 3; ++c)
    for (int by = 0; by < 2; ++by)
      for (int k = 0; k < 64; ++k) EXPECT_EQ(r.at(c, by, 0, k / 8, k % 8), j.at(by, 0, k / 8, k % 8));
}

TEST(FrequencyJnd, TooSmall) {
  EXPECT_THROW(frequency_jnd(GrayImage(7, 16), DctBasis(8)), std::invalid_argument);
}
