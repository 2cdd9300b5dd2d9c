#include "jndadv/dct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jndadv {

DctBasis::DctBasis(int block_size) : size_(block_size) {
  if (block_size < 1) throw std::invalid_argument("DctBasis: block size must be >= 1");
  matrix_.resize(static_cast<std::size_t>(size_) * size_);
  for (int k = 0; k < size_; ++k) {
    for (int n = 0; n < size_; ++n) {
      matrix_[static_cast<std::size_t>(k) * size_ + n] =
          norm_factor(k) * std::cos((2.0 * n + 1.0) * k * M_PI / (2.0 * size_));
    }
  }
}

double DctBasis::norm_factor(int k) const {
  return k == 0 ? std::sqrt(1.0 / size_) : std::sqrt(2.0 / size_);
}

void DctBasis::forward(const double* in, double* out) const {
  const int b = size_;
  std::vector<double> tmp(static_cast<std::size_t>(b) * b, 0.0);
  // tmp = D * in
  for (int k = 0; k < b; ++k) {
    for (int n = 0; n < b; ++n) {
      const double d = at(k, n);
      for (int j = 0; j < b; ++j) tmp[k * b + j] += d * in[n * b + j];
    }
  }
  // out = tmp * D^T
  for (int i = 0; i < b; ++i) {
    for (int k = 0; k < b; ++k) {
      double acc = 0.0;
      for (int j = 0; j < b; ++j) acc += tmp[i * b + j] * at(k, j);
      out[i * b + k] = acc;
    }
  }
}

void DctBasis::inverse(const double* in, double* out) const {
  const int b = size_;
  std::vector<double> tmp(static_cast<std::size_t>(b) * b, 0.0);
  // tmp = D^T * in
  for (int k = 0; k < b; ++k) {
    for (int n = 0; n < b; ++n) {
      const double d = at(k, n);
      for (int j = 0; j < b; ++j) tmp[n * b + j] += d * in[k * b + j];
    }
  }
  // out = tmp * D
  for (int i = 0; i < b; ++i) {
    for (int n = 0; n < b; ++n) {
      double acc = 0.0;
      for (int k = 0; k < b; ++k) acc += tmp[i * b + k] * at(k, n);
      out[i * b + n] = acc;
    }
  }
}

BlockSpectrum::BlockSpectrum(int height, int width, int channels, int block_size)
    : height_(height),
      width_(width),
      channels_(channels),
      block_size_(block_size),
      blocks_y_((height + block_size - 1) / block_size),
      blocks_x_((width + block_size - 1) / block_size) {
  if (height <= 0 || width <= 0 || channels <= 0 || block_size <= 0) {
    throw std::invalid_argument("BlockSpectrum: bad dimensions");
  }
  coeffs_.assign(static_cast<std::size_t>(channels_) * blocks_y_ * blocks_x_ * block_size_ *
                     block_size_,
                 0.0);
}

namespace {

enum class Padding { replicate, zero };

template <typename Sample>
BlockSpectrum transform_blocks(int height, int width, int channels, const DctBasis& basis,
                               Padding padding, Sample sample) {
  const int b = basis.block_size();
  BlockSpectrum spec(height, width, channels, b);
  std::vector<double> block(static_cast<std::size_t>(b) * b);
  for (int c = 0; c < channels; ++c) {
    for (int by = 0; by < spec.blocks_y(); ++by) {
      for (int bx = 0; bx < spec.blocks_x(); ++bx) {
        for (int i = 0; i < b; ++i) {
          for (int j = 0; j < b; ++j) {
            const int y = by * b + i;
            const int x = bx * b + j;
            const bool inside = y < height && x < width;
            block[i * b + j] = inside || padding == Padding::replicate
                                   ? sample(std::min(y, height - 1), std::min(x, width - 1), c)
                                   : 0.0;
          }
        }
        basis.forward(block.data(), spec.block(c, by, bx));
      }
    }
  }
  return spec;
}

void check_basis(const BlockSpectrum& spec, const DctBasis& basis) {
  if (spec.block_size() != basis.block_size()) {
    throw std::invalid_argument("block size mismatch between spectrum and basis");
  }
}

}  // namespace

BlockSpectrum block_dct(const ImageTensor& img, const DctBasis& basis) {
  return transform_blocks(img.height(), img.width(), img.channels(), basis, Padding::replicate,
                          [&](int y, int x, int c) { return img.at(y, x, c); });
}

BlockSpectrum block_dct(const GrayImage& img, const DctBasis& basis) {
  return transform_blocks(img.height(), img.width(), 1, basis, Padding::replicate,
                          [&](int y, int x, int) { return img.at(y, x); });
}

ImageTensor block_idct(const BlockSpectrum& spec, const DctBasis& basis) {
  check_basis(spec, basis);
  const int b = basis.block_size();
  ImageTensor out(spec.height(), spec.width(), spec.channels());
  std::vector<double> block(static_cast<std::size_t>(b) * b);
  for (int c = 0; c < spec.channels(); ++c) {
    for (int by = 0; by < spec.blocks_y(); ++by) {
      for (int bx = 0; bx < spec.blocks_x(); ++bx) {
        basis.inverse(spec.block(c, by, bx), block.data());
        for (int i = 0; i < b; ++i) {
          const int y = by * b + i;
          if (y >= spec.height()) break;
          for (int j = 0; j < b; ++j) {
            const int x = bx * b + j;
            if (x >= spec.width()) break;
            out.at(y, x, c) = block[i * b + j];
          }
        }
      }
    }
  }
  return out;
}

BlockSpectrum grad_to_freq(const ImageTensor& g, const DctBasis& basis) {
  return transform_blocks(g.height(), g.width(), g.channels(), basis, Padding::zero,
                          [&](int y, int x, int c) { return g.at(y, x, c); });
}

std::vector<double> transport_matrix(const DctBasis& basis) {
  const int b = basis.block_size();
  const int n = b * b;
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  // (A kron B)[i*b + k][j*b + l] = A[i][j] * B[k][l] with A = B = D^T.
  for (int i = 0; i < b; ++i) {
    for (int j = 0; j < b; ++j) {
      for (int k = 0; k < b; ++k) {
        for (int l = 0; l < b; ++l) {
          m[static_cast<std::size_t>(i * b + k) * n + (j * b + l)] = basis.at(j, i) * basis.at(l, k);
        }
      }
    }
  }
  return m;
}

BlockSpectrum grad_to_freq_kronecker(const ImageTensor& g, const DctBasis& basis) {
  const int b = basis.block_size();
  const int n = b * b;
  const std::vector<double> m = transport_matrix(basis);
  BlockSpectrum spec(g.height(), g.width(), g.channels(), b);
  std::vector<double> vec_g(n);
  for (int c = 0; c < g.channels(); ++c) {
    for (int by = 0; by < spec.blocks_y(); ++by) {
      for (int bx = 0; bx < spec.blocks_x(); ++bx) {
        // Column-major vectorization: vec[col * b + row].
        for (int row = 0; row < b; ++row) {
          for (int col = 0; col < b; ++col) {
            const int y = by * b + row;
            const int x = bx * b + col;
            vec_g[col * b + row] = (y < g.height() && x < g.width()) ? g.at(y, x, c) : 0.0;
          }
        }
        double* out = spec.block(c, by, bx);
        for (int q = 0; q < n; ++q) {
          double acc = 0.0;
          for (int p = 0; p < n; ++p) acc += vec_g[p] * m[static_cast<std::size_t>(p) * n + q];
          // q = v * b + u  ->  G[u][v]
          out[(q % b) * b + (q / b)] = acc;
        }
      }
    }
  }
  return spec;
}

}  // namespace jndadv
