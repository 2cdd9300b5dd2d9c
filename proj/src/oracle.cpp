#include "jndadv/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace jndadv {

std::vector<double> softmax(std::span<const double> scores) {
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> p(scores.size());
  double total = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    p[k] = std::exp(scores[k] - top);
    total += p[k];
  }
  for (double& v : p) v /= total;
  return p;
}

double cross_entropy(std::span<const double> scores, int label) {
  const double top = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (double s : scores) total += std::exp(s - top);
  return top + std::log(total) - scores[static_cast<std::size_t>(label)];
}

int argmax(std::span<const double> scores) {
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

double GradientOracle::loss(const ImageTensor& x, int label) const {
  check_label(label);
  return cross_entropy(scores(x), label);
}

int GradientOracle::predict(const ImageTensor& x) const { return argmax(scores(x)); }

void GradientOracle::check_input(const ImageTensor& x) const {
  if (x.shape() != input_shape()) {
    throw std::invalid_argument("oracle: input shape " + to_string(x.shape()) + " != expected " +
                                to_string(input_shape()));
  }
}

void GradientOracle::check_label(int label) const {
  if (label < 0 || label >= num_classes()) {
    throw std::invalid_argument("oracle: label " + std::to_string(label) + " out of range");
  }
}

// ---------------------------------------------------------------- linear

LinearClassifier::LinearClassifier(Shape input, int num_classes)
    : LinearClassifier(input, num_classes, std::vector<double>(input.size() * num_classes, 0.0),
                       std::vector<double>(static_cast<std::size_t>(num_classes), 0.0)) {}

LinearClassifier::LinearClassifier(Shape input, int num_classes, std::vector<double> weights,
                                   std::vector<double> bias)
    : input_(input), num_classes_(num_classes), weights_(std::move(weights)), bias_(std::move(bias)) {
  if (num_classes <= 0) throw std::invalid_argument("LinearClassifier: need at least one class");
  if (weights_.size() != input.size() * num_classes || bias_.size() != static_cast<std::size_t>(num_classes)) {
    throw std::invalid_argument("LinearClassifier: parameter sizes do not match shape");
  }
}

std::vector<double> LinearClassifier::scores(const ImageTensor& x) const {
  check_input(x);
  const std::size_t n = x.size();
  std::vector<double> s(bias_);
  for (int k = 0; k < num_classes_; ++k) {
    const double* w = weights_.data() + k * n;
    for (std::size_t i = 0; i < n; ++i) s[k] += w[i] * x[i];
  }
  return s;
}

ImageTensor LinearClassifier::loss_gradient(const ImageTensor& x, int label) const {
  check_label(label);
  std::vector<double> delta = softmax(scores(x));
  delta[label] -= 1.0;
  const std::size_t n = x.size();
  ImageTensor g(x.height(), x.width(), x.channels());
  for (int k = 0; k < num_classes_; ++k) {
    const double* w = weights_.data() + k * n;
    for (std::size_t i = 0; i < n; ++i) g[i] += w[i] * delta[k];
  }
  return g;
}

// ---------------------------------------------------------------- tiny CNN

namespace {

constexpr int kKernel = 3;
constexpr double kConv1Gain = 10.0;
constexpr double kConv2Gain = 3.0;

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// d/dz softplus(z) = sigmoid(z) = 1 - exp(-softplus(z)).
double softplus_slope(double activation) { return -std::expm1(-activation); }

// "Same" 3x3 convolution (cross-correlation) with zero padding, planar layout.
void conv_forward(const double* in, int cin, int h, int w, const double* weights, const double* bias,
                  int cout, double* out) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (int o = 0; o < cout; ++o) {
    double* dst_plane = out + o * plane;
    std::fill(dst_plane, dst_plane + plane, bias[o]);
    for (int i = 0; i < cin; ++i) {
      const double* src_plane = in + i * plane;
      for (int ky = 0; ky < kKernel; ++ky) {
        const int dy = ky - 1;
        const int y0 = std::max(0, -dy);
        const int y1 = std::min(h, h - dy);
        for (int kx = 0; kx < kKernel; ++kx) {
          const int dx = kx - 1;
          const int x0 = std::max(0, -dx);
          const int x1 = std::min(w, w - dx);
          const double wt = weights[((o * cin + i) * kKernel + ky) * kKernel + kx];
          for (int y = y0; y < y1; ++y) {
            const double* src = src_plane + (y + dy) * w + dx;
            double* dst = dst_plane + y * w;
            for (int x = x0; x < x1; ++x) dst[x] += wt * src[x];
          }
        }
      }
    }
  }
}

// Accumulates weight/bias gradients and (optionally) the input gradient.
void conv_backward(const double* in, int cin, int h, int w, const double* weights, const double* dout,
                   int cout, double* dweights, double* dbias, double* din) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (int o = 0; o < cout; ++o) {
    const double* g_plane = dout + o * plane;
    dbias[o] += std::accumulate(g_plane, g_plane + plane, 0.0);
    for (int i = 0; i < cin; ++i) {
      const double* src_plane = in + i * plane;
      double* din_plane = din ? din + i * plane : nullptr;
      for (int ky = 0; ky < kKernel; ++ky) {
        const int dy = ky - 1;
        const int y0 = std::max(0, -dy);
        const int y1 = std::min(h, h - dy);
        for (int kx = 0; kx < kKernel; ++kx) {
          const int dx = kx - 1;
          const int x0 = std::max(0, -dx);
          const int x1 = std::min(w, w - dx);
          const std::size_t widx = ((o * cin + i) * kKernel + ky) * kKernel + kx;
          const double wt = weights[widx];
          double acc = 0.0;
          for (int y = y0; y < y1; ++y) {
            const double* src = src_plane + (y + dy) * w + dx;
            const double* g = g_plane + y * w;
            for (int x = x0; x < x1; ++x) acc += g[x] * src[x];
            if (din_plane) {
              double* d = din_plane + (y + dy) * w + dx;
              for (int x = x0; x < x1; ++x) d[x] += wt * g[x];
            }
          }
          dweights[widx] += acc;
        }
      }
    }
  }
}

void mean_pool(const double* in, int c, int h, int w, double* out) {
  const int oh = h / 2;
  const int ow = w / 2;
  for (int k = 0; k < c; ++k) {
    const double* src = in + static_cast<std::size_t>(k) * h * w;
    double* dst = out + static_cast<std::size_t>(k) * oh * ow;
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        dst[y * ow + x] = 0.25 * (src[2 * y * w + 2 * x] + src[2 * y * w + 2 * x + 1] +
                                  src[(2 * y + 1) * w + 2 * x] + src[(2 * y + 1) * w + 2 * x + 1]);
      }
    }
  }
}

void mean_pool_backward(const double* dout, int c, int h, int w, double* din) {
  const int oh = h / 2;
  const int ow = w / 2;
  for (int k = 0; k < c; ++k) {
    const double* g = dout + static_cast<std::size_t>(k) * oh * ow;
    double* d = din + static_cast<std::size_t>(k) * h * w;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) d[y * w + x] = 0.25 * g[(y / 2) * ow + x / 2];
    }
  }
}

void init_uniform(std::vector<double>& v, std::size_t n, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  v.resize(n);
  for (double& x : v) x = dist(rng);
}

void validate(const TinyArchitecture& a) {
  if (a.input.height <= 0 || a.input.width <= 0 || a.input.height % 4 || a.input.width % 4) {
    throw std::invalid_argument("TinyClassifier: input height/width must be positive multiples of 4");
  }
  if ((a.input.channels != 1 && a.input.channels != 3) || a.conv1_maps <= 0 || a.conv2_maps <= 0 ||
      a.num_classes <= 1) {
    throw std::invalid_argument("TinyClassifier: invalid architecture");
  }
}

std::size_t fc_inputs(const TinyArchitecture& a) {
  return static_cast<std::size_t>(a.conv2_maps) * (a.input.height / 4) * (a.input.width / 4);
}

TinyParameters zero_like(const TinyParameters& p) {
  TinyParameters z;
  auto dst = z.blocks();
  auto src = p.blocks();
  for (std::size_t b = 0; b < dst.size(); ++b) dst[b]->assign(src[b]->size(), 0.0);
  return z;
}

}  // namespace

struct TinyClassifier::Activations {
  std::vector<double> a0, h1, p1, h2, p2, scores;
};

TinyClassifier::TinyClassifier(TinyArchitecture arch, std::uint64_t seed) : arch_(arch) {
  validate(arch_);
  std::mt19937_64 rng(seed);
  const int c = arch_.input.channels;
  const auto k2 = static_cast<std::size_t>(kKernel * kKernel);
  const std::size_t fan1 = c * k2;
  const std::size_t fan2 = arch_.conv1_maps * k2;
  const std::size_t fan3 = fc_inputs(arch_);
  // Inputs live in [0,1] and the class cue is a low-contrast texture, so the
  // conv layers start with larger weights than a unit-variance init; otherwise
  // the softplus stays in its linear range and training stalls near chance.
  init_uniform(params_.conv1_w, arch_.conv1_maps * fan1, kConv1Gain * std::sqrt(3.0 / fan1), rng);
  params_.conv1_b.assign(arch_.conv1_maps, 0.0);
  init_uniform(params_.conv2_w, arch_.conv2_maps * fan2, kConv2Gain * std::sqrt(3.0 / fan2), rng);
  params_.conv2_b.assign(arch_.conv2_maps, 0.0);
  init_uniform(params_.fc_w, arch_.num_classes * fan3, std::sqrt(3.0 / fan3), rng);
  params_.fc_b.assign(arch_.num_classes, 0.0);
}

TinyClassifier::TinyClassifier(TinyArchitecture arch, TinyParameters params)
    : arch_(arch), params_(std::move(params)) {
  validate(arch_);
  const auto k2 = static_cast<std::size_t>(kKernel * kKernel);
  const std::array<std::size_t, 6> expected = {
      arch_.conv1_maps * arch_.input.channels * k2, static_cast<std::size_t>(arch_.conv1_maps),
      arch_.conv2_maps * arch_.conv1_maps * k2,     static_cast<std::size_t>(arch_.conv2_maps),
      arch_.num_classes * fc_inputs(arch_),         static_cast<std::size_t>(arch_.num_classes)};
  const auto blocks = params_.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b]->size() != expected[b]) {
      throw std::invalid_argument(std::string("TinyClassifier: wrong size for ") +
                                  TinyParameters::kNames[b]);
    }
  }
}

void TinyClassifier::forward(const ImageTensor& x, Activations& act) const {
  check_input(x);
  const int h = arch_.input.height;
  const int w = arch_.input.width;
  const int c = arch_.input.channels;
  const int f1 = arch_.conv1_maps;
  const int f2 = arch_.conv2_maps;
  const std::size_t plane = static_cast<std::size_t>(h) * w;

  act.a0.resize(c * plane);
  for (int ch = 0; ch < c; ++ch) {
    for (std::size_t p = 0; p < plane; ++p) act.a0[ch * plane + p] = x[p * c + ch] / kMaxIntensity;
  }
  act.h1.resize(f1 * plane);
  conv_forward(act.a0.data(), c, h, w, params_.conv1_w.data(), params_.conv1_b.data(), f1, act.h1.data());
  for (double& v : act.h1) v = softplus(v);

  const int h2 = h / 2;
  const int w2 = w / 2;
  act.p1.resize(static_cast<std::size_t>(f1) * h2 * w2);
  mean_pool(act.h1.data(), f1, h, w, act.p1.data());
  act.h2.resize(static_cast<std::size_t>(f2) * h2 * w2);
  conv_forward(act.p1.data(), f1, h2, w2, params_.conv2_w.data(), params_.conv2_b.data(), f2,
               act.h2.data());
  for (double& v : act.h2) v = softplus(v);

  act.p2.resize(fc_inputs(arch_));
  mean_pool(act.h2.data(), f2, h2, w2, act.p2.data());

  const std::size_t n = act.p2.size();
  act.scores.assign(params_.fc_b.begin(), params_.fc_b.end());
  for (int k = 0; k < arch_.num_classes; ++k) {
    const double* wk = params_.fc_w.data() + k * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += wk[j] * act.p2[j];
    act.scores[k] += acc;
  }
}

std::vector<double> TinyClassifier::scores(const ImageTensor& x) const {
  Activations act;
  forward(x, act);
  return act.scores;
}

TinyClassifier::Backward TinyClassifier::backward(const ImageTensor& x, int label,
                                                  bool want_input_grad) const {
  check_label(label);
  Activations act;
  forward(x, act);

  const int h = arch_.input.height;
  const int w = arch_.input.width;
  const int c = arch_.input.channels;
  const int f1 = arch_.conv1_maps;
  const int f2 = arch_.conv2_maps;
  const int h2 = h / 2;
  const int w2 = w / 2;
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const std::size_t plane2 = static_cast<std::size_t>(h2) * w2;

  Backward out;
  out.loss = cross_entropy(act.scores, label);
  out.scores = act.scores;
  out.param_grad = zero_like(params_);
  TinyParameters& g = out.param_grad;

  std::vector<double> ds = softmax(act.scores);
  ds[label] -= 1.0;

  const std::size_t n = act.p2.size();
  std::vector<double> dp2(n, 0.0);
  for (int k = 0; k < arch_.num_classes; ++k) {
    g.fc_b[k] = ds[k];
    const double* wk = params_.fc_w.data() + k * n;
    double* gk = g.fc_w.data() + k * n;
    for (std::size_t j = 0; j < n; ++j) {
      gk[j] = ds[k] * act.p2[j];
      dp2[j] += wk[j] * ds[k];
    }
  }

  std::vector<double> dz2(static_cast<std::size_t>(f2) * plane2);
  mean_pool_backward(dp2.data(), f2, h2, w2, dz2.data());
  for (std::size_t i = 0; i < dz2.size(); ++i) dz2[i] *= softplus_slope(act.h2[i]);

  std::vector<double> dp1(static_cast<std::size_t>(f1) * plane2, 0.0);
  conv_backward(act.p1.data(), f1, h2, w2, params_.conv2_w.data(), dz2.data(), f2, g.conv2_w.data(),
                g.conv2_b.data(), dp1.data());

  std::vector<double> dz1(static_cast<std::size_t>(f1) * plane);
  mean_pool_backward(dp1.data(), f1, h, w, dz1.data());
  for (std::size_t i = 0; i < dz1.size(); ++i) dz1[i] *= softplus_slope(act.h1[i]);

  std::vector<double> da0;
  if (want_input_grad) da0.assign(c * plane, 0.0);
  conv_backward(act.a0.data(), c, h, w, params_.conv1_w.data(), dz1.data(), f1, g.conv1_w.data(),
                g.conv1_b.data(), want_input_grad ? da0.data() : nullptr);

  if (want_input_grad) {
    out.input_grad = ImageTensor(h, w, c);
    for (int ch = 0; ch < c; ++ch) {
      for (std::size_t p = 0; p < plane; ++p) out.input_grad[p * c + ch] = da0[ch * plane + p] / kMaxIntensity;
    }
  }
  return out;
}

ImageTensor TinyClassifier::loss_gradient(const ImageTensor& x, int label) const {
  return backward(x, label, true).input_grad;
}

// ---------------------------------------------------------------- checkpoint
//
// Little-endian flat file:
//   char[8]  magic "JNDTINY1"
//   u32      version (1)
//   u32 x 6  height, width, channels, conv1_maps, conv2_maps, num_classes
//   6 x { u64 count; f64[count] }  conv1.weight, conv1.bias, conv2.weight,
//                                  conv2.bias, fc.weight, fc.bias

namespace {

constexpr char kMagic[8] = {'J', 'N', 'D', 'T', 'I', 'N', 'Y', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::ostream& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_bytes(std::istream& in, int count) {
  std::uint64_t v = 0;
  for (int i = 0; i < count; ++i) {
    const int byte = in.get();
    if (byte == std::char_traits<char>::eof()) throw std::runtime_error("checkpoint: truncated file");
    v |= static_cast<std::uint64_t>(byte & 0xff) << (8 * i);
  }
  return v;
}

}  // namespace

void TinyClassifier::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  put_u32(out, kVersion);
  for (int v : {arch_.input.height, arch_.input.width, arch_.input.channels, arch_.conv1_maps,
                arch_.conv2_maps, arch_.num_classes}) {
    put_u32(out, static_cast<std::uint32_t>(v));
  }
  for (const auto* block : params_.blocks()) {
    put_u64(out, block->size());
    for (double v : *block) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

TinyClassifier TinyClassifier::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("checkpoint: bad magic in " + path.string());
  }
  if (get_bytes(in, 4) != kVersion) throw std::runtime_error("checkpoint: unsupported version");
  TinyArchitecture arch;
  arch.input.height = static_cast<int>(get_bytes(in, 4));
  arch.input.width = static_cast<int>(get_bytes(in, 4));
  arch.input.channels = static_cast<int>(get_bytes(in, 4));
  arch.conv1_maps = static_cast<int>(get_bytes(in, 4));
  arch.conv2_maps = static_cast<int>(get_bytes(in, 4));
  arch.num_classes = static_cast<int>(get_bytes(in, 4));
  validate(arch);
  TinyParameters params;
  for (auto* block : params.blocks()) {
    const std::uint64_t count = get_bytes(in, 8);
    if (count > (1u << 26)) throw std::runtime_error("checkpoint: implausible array length");
    block->resize(count);
    for (double& v : *block) v = std::bit_cast<double>(get_bytes(in, 8));
  }
  return TinyClassifier(arch, std::move(params));
}

// ---------------------------------------------------------------- data + training

void Dataset::add(ImageTensor image, int label, Split split) {
  if (label < 0 || (num_classes > 0 && label >= num_classes)) {
    throw std::invalid_argument("Dataset: label out of range");
  }
  if (!images.empty() && image.shape() != images.front().shape()) {
    throw std::invalid_argument("Dataset: images must share one shape");
  }
  images.push_back(std::move(image));
  labels.push_back(label);
  splits.push_back(split);
}

Dataset Dataset::subset(Split split) const {
  Dataset out;
  out.num_classes = num_classes;
  for (std::size_t i = 0; i < size(); ++i) {
    if (splits[i] == split) out.add(images[i], labels[i], splits[i]);
  }
  return out;
}

double accuracy(const GradientOracle& oracle, const Dataset& data) {
  if (data.size() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (oracle.predict(data.images[i]) == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

TrainReport train(TinyClassifier& model, const Dataset& data, const TrainOptions& options) {
  const Dataset train_set = data.subset(Split::train);
  const Dataset test_set = data.subset(Split::test);
  if (train_set.size() == 0) throw std::invalid_argument("train: empty training split");
  if (options.batch_size <= 0) throw std::invalid_argument("train: batch size must be positive");

  TrainReport report;
  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  TinyParameters velocity = zero_like(model.parameters());

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      TinyParameters grad = zero_like(model.parameters());
      for (std::size_t i = start; i < end; ++i) {
        const auto b = model.backward(train_set.images[order[i]], train_set.labels[order[i]], false);
        if (!std::isfinite(b.loss)) {
          throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   " (learning rate " + std::to_string(options.learning_rate) + ")");
        }
        epoch_loss += b.loss;
        auto dst = grad.blocks();
        auto src = b.param_grad.blocks();
        for (std::size_t k = 0; k < dst.size(); ++k) {
          for (std::size_t j = 0; j < dst[k]->size(); ++j) (*dst[k])[j] += (*src[k])[j];
        }
      }
      const double scale = options.learning_rate / static_cast<double>(end - start);
      auto params = model.parameters().blocks();
      auto vel = velocity.blocks();
      auto g = grad.blocks();
      for (std::size_t k = 0; k < params.size(); ++k) {
        for (std::size_t j = 0; j < params[k]->size(); ++j) {
          double& v = (*vel[k])[j];
          v = options.momentum * v - scale * (*g[k])[j];
          (*params[k])[j] += v;
        }
      }
    }
    epoch_loss /= static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss)) throw std::runtime_error("train: diverged");
    report.epoch_loss.push_back(epoch_loss);
  }
  report.train_accuracy = accuracy(model, train_set);
  report.test_accuracy = accuracy(model, test_set);
  return report;
}

// ---------------------------------------------------------------- finite differences

double finite_diff_coordinate(const GradientOracle& oracle, const ImageTensor& x, int label,
                              std::size_t index, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite differences: h must be positive");
  ImageTensor probe = x;
  probe[index] = x[index] + h;
  const double up = oracle.loss(probe, label);
  probe[index] = x[index] - h;
  const double down = oracle.loss(probe, label);
  return (up - down) / (2.0 * h);
}

ImageTensor finite_diff_gradient(const GradientOracle& oracle, const ImageTensor& x, int label,
                                 double h) {
  ImageTensor g(x.height(), x.width(), x.channels());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = finite_diff_coordinate(oracle, x, label, i, h);
  return g;
}

}  // namespace jndadv
