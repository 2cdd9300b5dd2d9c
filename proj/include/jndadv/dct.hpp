#pragma once

#include <vector>

#include "jndadv/tensor.hpp"

namespace jndadv {

inline constexpr int kDefaultBlockSize = 8;

// Orthogonal DCT-II matrix. Row k holds the k-th cosine basis vector:
//   D[k][n] = phi_k * cos((2n + 1) k pi / 2B),  phi_0 = sqrt(1/B), phi_k = sqrt(2/B).
class DctBasis {
 public:
  explicit DctBasis(int block_size = kDefaultBlockSize);

  int block_size() const { return size_; }
  double at(int k, int n) const { return matrix_[static_cast<std::size_t>(k) * size_ + n]; }
  double norm_factor(int k) const;
  const std::vector<double>& matrix() const { return matrix_; }

  // X = D x D^T and x = D^T X D on a single row-major B x B block.
  void forward(const double* in, double* out) const;
  void inverse(const double* in, double* out) const;

 private:
  int size_;
  std::vector<double> matrix_;
};

inline DctBasis dct_basis(int block_size) { return DctBasis(block_size); }

// Per-channel grid of B x B coefficient blocks covering an image that was
// replicate-padded to multiples of B.
class BlockSpectrum {
 public:
  BlockSpectrum() = default;
  BlockSpectrum(int height, int width, int channels, int block_size);

  int height() const { return height_; }  // unpadded image size
  int width() const { return width_; }
  int channels() const { return channels_; }
  int block_size() const { return block_size_; }
  int blocks_y() const { return blocks_y_; }
  int blocks_x() const { return blocks_x_; }
  int block_count() const { return blocks_y_ * blocks_x_; }
  std::size_t size() const { return coeffs_.size(); }

  std::size_t offset(int channel, int by, int bx) const {
    return ((static_cast<std::size_t>(channel) * blocks_y_ + by) * blocks_x_ + bx) *
           static_cast<std::size_t>(block_size_) * block_size_;
  }
  double& at(int channel, int by, int bx, int u, int v) {
    return coeffs_[offset(channel, by, bx) + static_cast<std::size_t>(u) * block_size_ + v];
  }
  double at(int channel, int by, int bx, int u, int v) const {
    return coeffs_[offset(channel, by, bx) + static_cast<std::size_t>(u) * block_size_ + v];
  }
  double& operator[](std::size_t i) { return coeffs_[i]; }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double* block(int channel, int by, int bx) { return coeffs_.data() + offset(channel, by, bx); }
  const double* block(int channel, int by, int bx) const {
    return coeffs_.data() + offset(channel, by, bx);
  }

  std::vector<double>& coeffs() { return coeffs_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  bool operator==(const BlockSpectrum&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  int block_size_ = 0;
  int blocks_y_ = 0;
  int blocks_x_ = 0;
  std::vector<double> coeffs_;
};

BlockSpectrum block_dct(const ImageTensor& img, const DctBasis& basis);
BlockSpectrum block_dct(const GrayImage& img, const DctBasis& basis);
ImageTensor block_idct(const BlockSpectrum& spectrum, const DctBasis& basis);

// Gradient of a loss with respect to the DCT coefficients given its gradient
// with respect to pixels. Padded pixels carry zero gradient. Computed as
// G = D g D^T per block.
BlockSpectrum grad_to_freq(const ImageTensor& spatial_grad, const DctBasis& basis);

// Same transport written as vec(G) = vec(g)^T (D^T kron D^T), with
// column-major vectorization. Used to cross-check grad_to_freq.
BlockSpectrum grad_to_freq_kronecker(const ImageTensor& spatial_grad, const DctBasis& basis);

// (D^T kron D^T), B^2 x B^2 row-major.
std::vector<double> transport_matrix(const DctBasis& basis);

}  // namespace jndadv
