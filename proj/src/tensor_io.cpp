#include "jndadv/tensor.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace jndadv {

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << shape.height << "x" << shape.width << "x" << shape.channels;
  return os.str();
}

ImageTensor::ImageTensor(int height, int width, int channels, double fill)
    : shape_{height, width, channels} {
  if (height <= 0 || width <= 0 || (channels != 1 && channels != 3)) {
    throw std::invalid_argument("ImageTensor: bad shape " + to_string(shape_));
  }
  data_.assign(shape_.size(), fill);
}

ImageTensor::ImageTensor(int height, int width, int channels, std::vector<double> data)
    : shape_{height, width, channels}, data_(std::move(data)) {
  if (height <= 0 || width <= 0 || (channels != 1 && channels != 3)) {
    throw std::invalid_argument("ImageTensor: bad shape " + to_string(shape_));
  }
  if (data_.size() != shape_.size()) {
    throw std::invalid_argument("ImageTensor: data length does not match " + to_string(shape_));
  }
}

GrayImage::GrayImage(int height, int width, double fill) : height_(height), width_(width) {
  if (height <= 0 || width <= 0) throw std::invalid_argument("GrayImage: bad shape");
  data_.assign(static_cast<std::size_t>(height) * width, fill);
}

GrayImage::GrayImage(int height, int width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (height <= 0 || width <= 0) throw std::invalid_argument("GrayImage: bad shape");
  if (data_.size() != static_cast<std::size_t>(height) * width) {
    throw std::invalid_argument("GrayImage: data length does not match shape");
  }
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  // Reads the next whitespace-delimited token, skipping '#' comments.
  std::string token() {
    skip_space_and_comments();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#') {
      out.push_back(static_cast<char>(bytes_[pos_++]));
    }
    return out;
  }

  int positive_int(const char* what) {
    const std::string tok = token();
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), ::isdigit) || tok.size() > 9) {
      throw PnmError(PnmError::Kind::malformed_header,
                     std::string("PNM: invalid ") + what + " '" + tok + "'");
    }
    const int v = std::stoi(tok);
    if (v <= 0) {
      throw PnmError(PnmError::Kind::malformed_header,
                     std::string("PNM: non-positive ") + what);
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from a binary raster.
  void single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw PnmError(PnmError::Kind::malformed_header, "PNM: missing whitespace after maxval");
    }
    ++pos_;
  }

  std::size_t position() const { return pos_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

ImageTensor parse_pnm(std::span<const unsigned char> bytes) {
  HeaderReader reader(bytes);
  const std::string magic = reader.token();
  int channels = 0;
  bool binary = false;
  if (magic == "P2") {
    channels = 1;
  } else if (magic == "P5") {
    channels = 1;
    binary = true;
  } else if (magic == "P3") {
    channels = 3;
  } else if (magic == "P6") {
    channels = 3;
    binary = true;
  } else {
    throw PnmError(PnmError::Kind::malformed_header, "PNM: unsupported magic '" + magic + "'");
  }
  const int width = reader.positive_int("width");
  const int height = reader.positive_int("height");
  const int maxval = reader.positive_int("maxval");
  if (maxval != 255) {
    throw PnmError(PnmError::Kind::unsupported_maxval,
                   "PNM: maxval " + std::to_string(maxval) + " (only 255 is supported)");
  }

  const std::size_t count = static_cast<std::size_t>(width) * height * channels;
  std::vector<double> data;
  data.reserve(count);
  if (binary) {
    reader.single_whitespace();
    const std::size_t start = reader.position();
    if (bytes.size() - start < count) {
      throw PnmError(PnmError::Kind::truncated_payload,
                     "PNM: expected " + std::to_string(count) + " samples, found " +
                         std::to_string(bytes.size() - start));
    }
    for (std::size_t i = 0; i < count; ++i) data.push_back(bytes[start + i]);
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const std::string tok = reader.token();
      if (tok.empty()) {
        throw PnmError(PnmError::Kind::truncated_payload,
                       "PNM: expected " + std::to_string(count) + " samples, found " +
                           std::to_string(i));
      }
      if (!std::all_of(tok.begin(), tok.end(), ::isdigit) || tok.size() > 3 ||
          std::stoi(tok) > maxval) {
        throw PnmError(PnmError::Kind::invalid_sample, "PNM: invalid sample '" + tok + "'");
      }
      data.push_back(std::stoi(tok));
    }
  }
  return ImageTensor(height, width, channels, std::move(data));
}

ImageTensor load_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PnmError(PnmError::Kind::io, "PNM: cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return parse_pnm(bytes);
}

unsigned char quantize(double value) {
  const double v = std::clamp(value, 0.0, kMaxIntensity);
  return static_cast<unsigned char>(std::lround(v));
}

std::vector<unsigned char> encode_pnm(const ImageTensor& img, bool ascii) {
  const char* magic = img.channels() == 1 ? (ascii ? "P2" : "P5") : (ascii ? "P3" : "P6");
  std::ostringstream header;
  header << magic << "\n" << img.width() << " " << img.height() << "\n255\n";
  const std::string h = header.str();
  std::vector<unsigned char> out(h.begin(), h.end());
  if (ascii) {
    const std::size_t row = static_cast<std::size_t>(img.width()) * img.channels();
    for (std::size_t i = 0; i < img.size(); ++i) {
      const std::string s = std::to_string(quantize(img[i]));
      out.insert(out.end(), s.begin(), s.end());
      out.push_back((i + 1) % row == 0 ? '\n' : ' ');
    }
  } else {
    out.reserve(out.size() + img.size());
    for (double v : img.data()) out.push_back(quantize(v));
  }
  return out;
}

void save_pnm(const ImageTensor& img, const std::filesystem::path& path, bool ascii) {
  const auto bytes = encode_pnm(img, ascii);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PnmError(PnmError::Kind::io, "PNM: cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw PnmError(PnmError::Kind::io, "PNM: write failed for " + path.string());
}

GrayImage to_grayscale(const ImageTensor& img) {
  GrayImage gray(img.height(), img.width());
  if (img.channels() == 1) {
    std::copy(img.data().begin(), img.data().end(), gray.data().begin());
    return gray;
  }
  for (std::size_t i = 0; i < gray.size(); ++i) {
    gray[i] = 0.299 * img[3 * i] + 0.587 * img[3 * i + 1] + 0.114 * img[3 * i + 2];
  }
  return gray;
}

ImageTensor replicate(const GrayImage& gray, int channels) {
  ImageTensor out(gray.height(), gray.width(), channels);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    for (int c = 0; c < channels; ++c) out[i * channels + c] = gray[i];
  }
  return out;
}

ImageTensor from_gray(const GrayImage& gray) { return replicate(gray, 1); }

void clamp_pixels(ImageTensor& img) {
  for (double& v : img.data()) v = std::clamp(v, 0.0, kMaxIntensity);
}

ImageTensor clamped(ImageTensor img) {
  clamp_pixels(img);
  return img;
}

ImageTensor subtract(const ImageTensor& a, const ImageTensor& b) {
  if (a.shape() != b.shape()) throw std::invalid_argument("subtract: shape mismatch");
  ImageTensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

ImageTensor add(const ImageTensor& a, const ImageTensor& b) {
  if (a.shape() != b.shape()) throw std::invalid_argument("add: shape mismatch");
  ImageTensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

}  // namespace jndadv
