#pragma once

#include <vector>

#include "jndadv/dct.hpp"
#include "jndadv/tensor.hpp"

namespace jndadv {

// Constants of the contrast-sensitivity base threshold
//   T(u,v) = s / (phi_u phi_v) * exp(c w) / (a + b w),  w = sqrt(u^2 + v^2) / 2B.
struct CsfParams {
  double a = 1.33;
  double b = 0.11;
  double c = 11.0;
  double s = 0.25;
  double masking_exponent = 0.6;
};

// Per-block, per-coefficient thresholds in DCT coefficient units. Same
// layout as a single-channel BlockSpectrum.
class JndMapF {
 public:
  JndMapF() = default;
  explicit JndMapF(BlockSpectrum thresholds) : thresholds_(std::move(thresholds)) {}

  int blocks_y() const { return thresholds_.blocks_y(); }
  int blocks_x() const { return thresholds_.blocks_x(); }
  int block_size() const { return thresholds_.block_size(); }
  double at(int by, int bx, int u, int v) const { return thresholds_.at(0, by, bx, u, v); }
  const BlockSpectrum& spectrum() const { return thresholds_; }

  // Replicates the map over every channel of a spectrum with the given layout.
  BlockSpectrum replicated(int channels) const;

 private:
  BlockSpectrum thresholds_;
};

// B x B row-major matrix of base thresholds.
std::vector<double> csf_base_threshold(const DctBasis& basis, const CsfParams& params = {});

// Threshold elevation for an AC coefficient of the given magnitude.
double contrast_masking(double coeff, double base, double exponent = CsfParams{}.masking_exponent);

JndMapF frequency_jnd(const GrayImage& img, const DctBasis& basis, const CsfParams& params = {});

}  // namespace jndadv
