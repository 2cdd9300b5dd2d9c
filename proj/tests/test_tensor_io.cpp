#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "jndadv/tensor.hpp"
#include "test_util.hpp"

using namespace jndadv;
namespace fs = std::filesystem;

namespace {

std::vector<unsigned char> bytes_of(const std::string& header, std::vector<unsigned char> payload = {}) {
  std::vector<unsigned char> out(header.begin(), header.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

PnmError::Kind parse_error_kind(const std::vector<unsigned char>& bytes) {
  try {
    parse_pnm(bytes);
  } catch (const PnmError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a parse error";
  return PnmError::Kind::io;
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("jndadv_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(Pnm, DecodesBinaryPgm) {
  const ImageTensor img = parse_pnm(bytes_of("P5\n2 2\n255\n", {0, 255, 128, 64}));
  EXPECT_EQ(img.shape(), (Shape{2, 2, 1}));
  EXPECT_EQ(img.values(), (std::vector<double>{0, 255, 128, 64}));
}

TEST(Pnm, DecodesBinaryPpm) {
  const ImageTensor img = parse_pnm(bytes_of("P6 1 1 255\n", {10, 20, 30}));
  EXPECT_EQ(img.shape(), (Shape{1, 1, 3}));
  EXPECT_EQ(img.values(), (std::vector<double>{10, 20, 30}));
}

TEST(Pnm, DecodesAsciiWithComments) {
  const ImageTensor gray = parse_pnm(bytes_of("P2\n# comment\n3 1\n255\n1 2\n 255\n"));
  EXPECT_EQ(gray.values(), (std::vector<double>{1, 2, 255}));
  const ImageTensor color = parse_pnm(bytes_of("P3 1 2 255 1 2 3 4 5 6"));
  EXPECT_EQ(color.shape(), (Shape{2, 1, 3}));
  EXPECT_EQ(color.values(), (std::vector<double>{1, 2, 3, 4, 5, 6}));
}

TEST(Pnm, DistinctErrors) {
  EXPECT_EQ(parse_error_kind(bytes_of("P5\n2 2\n255\n", {1, 2, 3})), PnmError::Kind::truncated_payload);
  EXPECT_EQ(parse_error_kind(bytes_of("P5\n2 2\n65535\n", {1, 2, 3, 4})), PnmError::Kind::unsupported_maxval);
  EXPECT_EQ(parse_error_kind(bytes_of("P5\n2 2\n15\n", {1, 2, 3, 4})), PnmError::Kind::unsupported_maxval);
  EXPECT_EQ(parse_error_kind(bytes_of("P7\n2 2\n255\n", {1, 2, 3, 4})), PnmError::Kind::malformed_header);
  EXPECT_EQ(parse_error_kind(bytes_of("P5\n2 x\n255\n", {1, 2, 3, 4})), PnmError::Kind::malformed_header);
  EXPECT_EQ(parse_error_kind(bytes_of("P5\n0 2\n255\n")), PnmError::Kind::malformed_header);
  EXPECT_EQ(parse_error_kind(bytes_of("P2 2 1 255 1")), PnmError::Kind::truncated_payload);
  EXPECT_EQ(parse_error_kind(bytes_of("P2 2 1 255 1 300")), PnmError::Kind::invalid_sample);
  EXPECT_EQ(parse_error_kind(bytes_of("")), PnmError::Kind::malformed_header);
}

TEST(Pnm, MissingFileIsIoError) {
  try {
    load_pnm("/nonexistent/dir/img.pgm");
    FAIL();
  } catch (const PnmError& e) {
    EXPECT_EQ(e.kind(), PnmError::Kind::io);
  }
}

TEST(Pnm, RoundTripIntegerImages) {
  for (int c : {1, 3}) {
    for (bool ascii : {false, true}) {
      const ImageTensor img = testutil::random_integer_image(7, 5, c, 11 + c);
      const fs::path path = temp_file("rt.pnm");
      save_pnm(img, path, ascii);
      EXPECT_EQ(load_pnm(path), img) << "channels " << c << " ascii " << ascii;
      fs::remove(path);
    }
  }
}

TEST(Pnm, RoundingHalfAwayFromZero) {
  EXPECT_EQ(quantize(127.5), 128);
  EXPECT_EQ(quantize(127.4), 127);
  EXPECT_EQ(quantize(0.5), 1);
  EXPECT_EQ(quantize(-3.0), 0);
  EXPECT_EQ(quantize(300.0), 255);
  const ImageTensor img(1, 2, 1, std::vector<double>{127.5, 127.4});
  EXPECT_EQ(parse_pnm(encode_pnm(img)).values(), (std::vector<double>{128, 127}));
}

TEST(Grayscale, Bt601Weights) {
  for (double g : {0.0, 17.0, 128.25, 255.0}) {
    const ImageTensor img(1, 1, 3, std::vector<double>{g, g, g});
    EXPECT_NEAR(to_grayscale(img)[0], g, 1e-12);
  }
  EXPECT_NEAR(to_grayscale(ImageTensor(1, 1, 3, std::vector<double>{255, 0, 0}))[0], 76.245, 1e-12);
  const ImageTensor single = testutil::random_image(3, 4, 1, 5);
  EXPECT_EQ(to_grayscale(single).data()[5], single[5]);
}

TEST(Grayscale, Linear) {
  const ImageTensor x = testutil::random_image(6, 5, 3, 1);
  const ImageTensor y = testutil::random_image(6, 5, 3, 2);
  const double a = 0.7, b = -1.3;
  ImageTensor mix(6, 5, 3);
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * x[i] + b * y[i];
  const GrayImage gm = to_grayscale(mix), gx = to_grayscale(x), gy = to_grayscale(y);
  for (std::size_t i = 0; i < gm.size(); ++i) EXPECT_NEAR(gm[i], a * gx[i] + b * gy[i], 1e-9);
}

TEST(Tensor, ClampAndArithmetic) {
  ImageTensor a(1, 3, 1, std::vector<double>{-5, 100, 300});
  const ImageTensor b(1, 3, 1, std::vector<double>{1, 2, 3});
  EXPECT_EQ(add(a, b).values(), (std::vector<double>{-4, 102, 303}));
  EXPECT_EQ(subtract(a, b).values(), (std::vector<double>{-6, 98, 297}));
  clamp_pixels(a);
  EXPECT_EQ(a.values(), (std::vector<double>{0, 100, 255}));
  EXPECT_THROW(add(a, ImageTensor(1, 3, 3)), std::invalid_argument);
  EXPECT_THROW(ImageTensor(2, 2, 2), std::invalid_argument);
  EXPECT_THROW(ImageTensor(2, 2, 1, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST(Tensor, InterleavedLayout) {
  ImageTensor img(2, 3, 3);
  img.at(1, 2, 1) = 9.0;
  EXPECT_EQ(img[(1 * 3 + 2) * 3 + 1], 9.0);
  const ImageTensor rep = replicate(GrayImage(2, 2, std::vector<double>{1, 2, 3, 4}), 3);
  EXPECT_EQ(rep.at(1, 0, 2), 3.0);
  EXPECT_EQ(from_gray(GrayImage(1, 1, 7.0)).shape(), (Shape{1, 1, 1}));
}
