#include "jndadv/jnd_frequency.hpp"

#include <cmath>
#include <stdexcept>

namespace jndadv {

BlockSpectrum JndMapF::replicated(int channels) const {
  const BlockSpectrum& src = thresholds_;
  BlockSpectrum out(src.height(), src.width(), channels, src.block_size());
  const std::size_t per_channel = src.size();
  for (int c = 0; c < channels; ++c) {
    std::copy(src.coeffs().begin(), src.coeffs().end(),
              out.coeffs().begin() + static_cast<std::ptrdiff_t>(c * per_channel));
  }
  return out;
}

std::vector<double> csf_base_threshold(const DctBasis& basis, const CsfParams& p) {
  const int b = basis.block_size();
  std::vector<double> t(static_cast<std::size_t>(b) * b);
  for (int u = 0; u < b; ++u) {
    for (int v = 0; v < b; ++v) {
      const double omega = std::sqrt(static_cast<double>(u * u + v * v)) / (2.0 * b);
      t[static_cast<std::size_t>(u) * b + v] = p.s / (basis.norm_factor(u) * basis.norm_factor(v)) *
                                               std::exp(p.c * omega) / (p.a + p.b * omega);
    }
  }
  return t;
}

double contrast_masking(double coeff, double base, double exponent) {
  if (!(base > 0.0)) throw std::invalid_argument("contrast_masking: base must be positive");
  return std::max(1.0, std::pow(std::abs(coeff) / base, exponent));
}

JndMapF frequency_jnd(const GrayImage& img, const DctBasis& basis, const CsfParams& params) {
  const int b = basis.block_size();
  if (img.height() < b || img.width() < b) {
    throw std::invalid_argument("frequency_jnd: image smaller than one block");
  }
  const std::vector<double> base = csf_base_threshold(basis, params);
  BlockSpectrum spec = block_dct(img, basis);
  for (int by = 0; by < spec.blocks_y(); ++by) {
    for (int bx = 0; bx < spec.blocks_x(); ++bx) {
      double* block = spec.block(0, by, bx);
      for (int k = 0; k < b * b; ++k) {
        const double factor = k == 0 ? 1.0 : contrast_masking(block[k], base[k], params.masking_exponent);
        block[k] = base[k] * factor;
      }
    }
  }
  return JndMapF(std::move(spec));
}

}  // namespace jndadv
