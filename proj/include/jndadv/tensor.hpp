#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace jndadv {

inline constexpr double kMaxIntensity = 255.0;

struct Shape {
  int height = 0;
  int width = 0;
  int channels = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width) *
           static_cast<std::size_t>(channels);
  }
  bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& shape);

// H x W x C image, row-major with interleaved channels, values in 8-bit
// intensity units.
class ImageTensor {
 public:
  ImageTensor() = default;
  ImageTensor(int height, int width, int channels, double fill = 0.0);
  ImageTensor(int height, int width, int channels, std::vector<double> data);

  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  int channels() const { return shape_.channels; }
  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  double& at(int y, int x, int c) { return data_[index(y, x, c)]; }
  double at(int y, int x, int c) const { return data_[index(y, x, c)]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(shape_.width) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(shape_.channels) +
           static_cast<std::size_t>(c);
  }

  bool operator==(const ImageTensor&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Single-channel image.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int height, int width, double fill = 0.0);
  GrayImage(int height, int width, std::vector<double> data);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }

  double& at(int y, int x) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  double at(int y, int x) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool operator==(const GrayImage&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

class PnmError : public std::runtime_error {
 public:
  enum class Kind { io, malformed_header, unsupported_maxval, truncated_payload, invalid_sample };

  PnmError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

ImageTensor load_pnm(const std::filesystem::path& path);
ImageTensor parse_pnm(std::span<const unsigned char> bytes);

// Values are clamped to [0,255] and rounded half away from zero.
void save_pnm(const ImageTensor& img, const std::filesystem::path& path, bool ascii = false);
std::vector<unsigned char> encode_pnm(const ImageTensor& img, bool ascii = false);
unsigned char quantize(double value);

GrayImage to_grayscale(const ImageTensor& img);
ImageTensor replicate(const GrayImage& gray, int channels);
ImageTensor from_gray(const GrayImage& gray);

void clamp_pixels(ImageTensor& img);
ImageTensor clamped(ImageTensor img);

ImageTensor subtract(const ImageTensor& a, const ImageTensor& b);
ImageTensor add(const ImageTensor& a, const ImageTensor& b);

}  // namespace jndadv
