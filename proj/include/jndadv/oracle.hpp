#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "jndadv/tensor.hpp"

namespace jndadv {

std::vector<double> softmax(std::span<const double> scores);
double cross_entropy(std::span<const double> scores, int label);
int argmax(std::span<const double> scores);

// A classifier f(x) that exposes class scores and the gradient of the
// cross-entropy loss J(f, x, y) with respect to its input pixels.
class GradientOracle {
 public:
  virtual ~GradientOracle() = default;

  virtual int num_classes() const = 0;
  virtual Shape input_shape() const = 0;
  virtual std::vector<double> scores(const ImageTensor& x) const = 0;
  virtual ImageTensor loss_gradient(const ImageTensor& x, int label) const = 0;
  virtual double loss(const ImageTensor& x, int label) const;

  int predict(const ImageTensor& x) const;

 protected:
  void check_input(const ImageTensor& x) const;
  void check_label(int label) const;
};

// scores = W x + b on raw pixel values. Mostly useful as a closed-form
// reference in tests.
class LinearClassifier final : public GradientOracle {
 public:
  LinearClassifier(Shape input, int num_classes);
  LinearClassifier(Shape input, int num_classes, std::vector<double> weights, std::vector<double> bias);

  int num_classes() const override { return num_classes_; }
  Shape input_shape() const override { return input_; }
  std::vector<double> scores(const ImageTensor& x) const override;
  ImageTensor loss_gradient(const ImageTensor& x, int label) const override;

  const std::vector<double>& weights() const { return weights_; }

 private:
  Shape input_;
  int num_classes_;
  std::vector<double> weights_;  // num_classes x input.size()
  std::vector<double> bias_;
};

struct TinyArchitecture {
  Shape input{32, 32, 3};
  int conv1_maps = 8;
  int conv2_maps = 16;
  int num_classes = 4;

  bool operator==(const TinyArchitecture&) const = default;
};

// Parameter arrays of TinyClassifier. Convolution weights are laid out as
// [out][in][ky][kx]; the dense layer as [class][map][y][x].
struct TinyParameters {
  std::vector<double> conv1_w, conv1_b, conv2_w, conv2_b, fc_w, fc_b;

  static constexpr std::array<const char*, 6> kNames = {"conv1.weight", "conv1.bias", "conv2.weight",
                                                        "conv2.bias",   "fc.weight",  "fc.bias"};
  std::array<std::vector<double>*, 6> blocks() {
    return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &fc_w, &fc_b};
  }
  std::array<const std::vector<double>*, 6> blocks() const {
    return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &fc_w, &fc_b};
  }
  bool operator==(const TinyParameters&) const = default;
};

// conv3x3 -> softplus -> 2x2 mean-pool -> conv3x3 -> softplus -> 2x2 mean-pool -> dense.
// Inputs are in [0,255] and scaled by 1/255 internally; convolutions use
// zero padding ("same" output size).
class TinyClassifier final : public GradientOracle {
 public:
  struct Backward {
    double loss = 0.0;
    std::vector<double> scores;
    ImageTensor input_grad;
    TinyParameters param_grad;
  };

  TinyClassifier(TinyArchitecture arch, std::uint64_t seed);
  TinyClassifier(TinyArchitecture arch, TinyParameters params);

  int num_classes() const override { return arch_.num_classes; }
  Shape input_shape() const override { return arch_.input; }
  std::vector<double> scores(const ImageTensor& x) const override;
  ImageTensor loss_gradient(const ImageTensor& x, int label) const override;

  Backward backward(const ImageTensor& x, int label, bool want_input_grad = true) const;

  const TinyArchitecture& architecture() const { return arch_; }
  TinyParameters& parameters() { return params_; }
  const TinyParameters& parameters() const { return params_; }

  void save(const std::filesystem::path& path) const;
  static TinyClassifier load(const std::filesystem::path& path);

 private:
  struct Activations;
  void forward(const ImageTensor& x, Activations& act) const;

  TinyArchitecture arch_;
  TinyParameters params_;
};

enum class Split { train, test };

struct Dataset {
  std::vector<ImageTensor> images;
  std::vector<int> labels;
  std::vector<Split> splits;
  int num_classes = 0;

  std::size_t size() const { return images.size(); }
  void add(ImageTensor image, int label, Split split);
  Dataset subset(Split split) const;
};

struct TrainOptions {
  int epochs = 15;
  double learning_rate = 0.01;
  double momentum = 0.9;
  int batch_size = 16;
  std::uint64_t seed = 1;
};

struct TrainReport {
  std::vector<double> epoch_loss;  // mean training loss per epoch
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
};

// Minibatch SGD with momentum on the train split. Deterministic given the
// seed. Throws std::runtime_error if the loss becomes non-finite.
TrainReport train(TinyClassifier& model, const Dataset& data, const TrainOptions& options);

double accuracy(const GradientOracle& oracle, const Dataset& data);

// Central-difference estimate of dJ/dx at every input coordinate.
ImageTensor finite_diff_gradient(const GradientOracle& oracle, const ImageTensor& x, int label,
                                 double h);
double finite_diff_coordinate(const GradientOracle& oracle, const ImageTensor& x, int label,
                              std::size_t index, double h);

}  // namespace jndadv
