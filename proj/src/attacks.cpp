#include "jndadv/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jndadv/jnd_spatial.hpp"

namespace jndadv {

std::string to_string(Method method) {
  switch (method) {
    case Method::fgsm: return "fgsm";
    case Method::mim: return "mim";
    case Method::dim: return "dim";
  }
  return "?";
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::uniform: return "uniform";
    case Mode::ssa: return "ssa";
    case Mode::fsa: return "fsa";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "fgsm") return Method::fgsm;
  if (name == "mim") return Method::mim;
  if (name == "dim") return Method::dim;
  throw std::invalid_argument("unknown attack method '" + name + "'");
}

Mode parse_mode(const std::string& name) {
  if (name == "uniform") return Mode::uniform;
  if (name == "ssa") return Mode::ssa;
  if (name == "fsa") return Mode::fsa;
  throw std::invalid_argument("unknown attack mode '" + name + "'");
}

double AttackConfig::budget() const {
  switch (mode) {
    case Mode::uniform: return epsilon;
    case Mode::ssa: return alpha0;
    case Mode::fsa: return beta0;
  }
  return 0.0;
}

void AttackConfig::set_budget(double value) {
  switch (mode) {
    case Mode::uniform: epsilon = value; break;
    case Mode::ssa: alpha0 = value; break;
    case Mode::fsa: beta0 = value; break;
  }
}

void AttackConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("attack: T must be >= 1");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("attack: p must lie in [0,1]");
  if (mode == Mode::uniform && epsilon < 0.0) throw std::invalid_argument("attack: epsilon must be >= 0");
  if (mode == Mode::ssa && alpha0 < 0.0) throw std::invalid_argument("attack: alpha0 must be >= 0");
  if (mode == Mode::fsa && beta0 < 0.0) throw std::invalid_argument("attack: beta0 must be >= 0");
  if (block_size < 1) throw std::invalid_argument("attack: block size must be >= 1");
}

// ---------------------------------------------------------------- estimators

ImageTensor fgsm_gradient(const GradientOracle& oracle, const ImageTensor& x, int label) {
  return oracle.loss_gradient(x, label);
}

namespace {

void accumulate_momentum(ImageTensor& state, const ImageTensor& grad, double mu) {
  if (state.size() == 0) state = ImageTensor(grad.height(), grad.width(), grad.channels());
  double l1 = 0.0;
  for (double v : grad.data()) l1 += std::abs(v);
  const bool normalize = l1 >= 1e-12;
  for (std::size_t i = 0; i < state.size(); ++i) {
    state[i] = mu * state[i] + (normalize ? grad[i] / l1 : 0.0);
  }
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

ImageTensor mim_gradient(ImageTensor& state, const GradientOracle& oracle, const ImageTensor& x,
                         int label, double mu) {
  accumulate_momentum(state, oracle.loss_gradient(x, label), mu);
  return state;
}

ImageTensor dim_transform(const ImageTensor& x, double p, std::mt19937_64& rng) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("dim_transform: p must lie in [0,1]");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (!(unit(rng) < p)) return x;

  const int h = x.height();
  const int w = x.width();
  const int c = x.channels();
  std::uniform_real_distribution<double> factor(0.9, 1.1);
  const int rh = std::max(1, static_cast<int>(std::lround(h * factor(rng))));
  const int rw = std::max(1, static_cast<int>(std::lround(w * factor(rng))));
  const int oy = std::uniform_int_distribution<int>(0, std::abs(rh - h))(rng);
  const int ox = std::uniform_int_distribution<int>(0, std::abs(rw - w))(rng);

  // Bilinear sample of x at the position that maps to resized pixel (r, q).
  const double sy = static_cast<double>(h) / rh;
  const double sx = static_cast<double>(w) / rw;
  auto resized = [&](int r, int q, int ch) {
    const double fy = std::clamp((r + 0.5) * sy - 0.5, 0.0, h - 1.0);
    const double fx = std::clamp((q + 0.5) * sx - 0.5, 0.0, w - 1.0);
    const int y0 = static_cast<int>(fy);
    const int x0 = static_cast<int>(fx);
    const int y1 = std::min(y0 + 1, h - 1);
    const int x1 = std::min(x0 + 1, w - 1);
    const double ay = fy - y0;
    const double ax = fx - x0;
    return (1 - ay) * ((1 - ax) * x.at(y0, x0, ch) + ax * x.at(y0, x1, ch)) +
           ay * ((1 - ax) * x.at(y1, x0, ch) + ax * x.at(y1, x1, ch));
  };
  // Larger than the input: crop at the offset. Smaller: place at the offset
  // and replicate the border.
  auto source = [](int i, int resized_len, int out_len, int offset) {
    return resized_len >= out_len ? i + offset : std::clamp(i - offset, 0, resized_len - 1);
  };

  ImageTensor out(h, w, c);
  for (int y = 0; y < h; ++y) {
    const int r = source(y, rh, h, oy);
    for (int xx = 0; xx < w; ++xx) {
      const int q = source(xx, rw, w, ox);
      for (int ch = 0; ch < c; ++ch) out.at(y, xx, ch) = resized(r, q, ch);
    }
  }
  return out;
}

ImageTensor dim_transform(const ImageTensor& x, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return dim_transform(x, p, rng);
}

GradientEstimator::GradientEstimator(const GradientOracle& oracle, const AttackConfig& cfg)
    : oracle_(oracle), method_(cfg.method), mu_(cfg.mu), p_(cfg.p), rng_(cfg.seed) {}

ImageTensor GradientEstimator::next(const ImageTensor& x, int label) {
  switch (method_) {
    case Method::fgsm:
      return fgsm_gradient(oracle_, x, label);
    case Method::mim:
      return mim_gradient(momentum_, oracle_, x, label, mu_);
    case Method::dim:
      accumulate_momentum(momentum_, oracle_.loss_gradient(dim_transform(x, p_, rng_), label), mu_);
      return momentum_;
  }
  throw std::logic_error("unknown method");
}

// ---------------------------------------------------------------- attack loops

namespace {

AttackResult finish(const GradientOracle& oracle, const ImageTensor& clean, ImageTensor adversarial,
                    int label, int iterations) {
  AttackResult r;
  r.perturbation = subtract(adversarial, clean);
  r.substitute_fooled = oracle.predict(adversarial) != label;
  r.adversarial = std::move(adversarial);
  r.iterations_used = iterations;
  return r;
}

// Shared sign-step loop: x <- clamp(x + scale[i] * sign(g)), where the
// per-element scale is budget / T times the (channel-replicated) map.
template <typename ScaleAt>
AttackResult sign_step_attack(const GradientOracle& oracle, const ImageTensor& x, int label,
                              const AttackConfig& cfg, ScaleAt scale_at) {
  cfg.validate();
  GradientEstimator estimator(oracle, cfg);
  ImageTensor adv = x;
  int t = 0;
  while (t < cfg.iterations && oracle.predict(adv) == label) {
    const ImageTensor g = estimator.next(adv, label);
    for (std::size_t i = 0; i < adv.size(); ++i) adv[i] += scale_at(i) * sign(g[i]);
    clamp_pixels(adv);
    ++t;
  }
  return finish(oracle, x, std::move(adv), label, t);
}

}  // namespace

AttackResult uniform_attack(const GradientOracle& oracle, const ImageTensor& x, int label,
                            const AttackConfig& cfg) {
  const double step = cfg.epsilon / cfg.iterations;
  return sign_step_attack(oracle, x, label, cfg, [step](std::size_t) { return step; });
}

AttackResult ssa_attack(const GradientOracle& oracle, const ImageTensor& x, int label,
                        const AttackConfig& cfg, const GrayImage& jnd) {
  if (jnd.height() != x.height() || jnd.width() != x.width()) {
    throw std::invalid_argument("ssa_attack: JND map size does not match the image");
  }
  const double step = cfg.alpha0 / cfg.iterations;
  const auto channels = static_cast<std::size_t>(x.channels());
  return sign_step_attack(oracle, x, label, cfg,
                          [&](std::size_t i) { return step * jnd[i / channels]; });
}

AttackResult ssa_attack(const GradientOracle& oracle, const ImageTensor& x, int label,
                        const AttackConfig& cfg) {
  return ssa_attack(oracle, x, label, cfg, spatial_jnd(to_grayscale(x)));
}

AttackResult fsa_attack(const GradientOracle& oracle, const ImageTensor& x, int label,
                        const AttackConfig& cfg, const JndMapF& jnd) {
  cfg.validate();
  const DctBasis basis(cfg.block_size);
  if (jnd.block_size() != cfg.block_size) throw std::invalid_argument("fsa_attack: block size mismatch");
  const BlockSpectrum budget = jnd.replicated(x.channels());
  BlockSpectrum spectrum = block_dct(x, basis);
  if (budget.size() != spectrum.size()) {
    throw std::invalid_argument("fsa_attack: JND map layout does not match the image");
  }

  GradientEstimator estimator(oracle, cfg);
  const double step = cfg.beta0 / cfg.iterations;
  ImageTensor adv = x;
  int t = 0;
  int skipped = 0;
  while (t < cfg.iterations && oracle.predict(adv) == label) {
    const BlockSpectrum g = grad_to_freq(estimator.next(adv, label), basis);
    double peak = 0.0;
    for (double v : g.coeffs()) peak = std::max(peak, std::abs(v));
    ++t;
    if (peak == 0.0) {
      ++skipped;
      continue;
    }
    for (std::size_t k = 0; k < spectrum.size(); ++k) spectrum[k] += step * budget[k] * (g[k] / peak);
    adv = clamped(block_idct(spectrum, basis));
  }
  AttackResult r = finish(oracle, x, std::move(adv), label, t);
  r.skipped_steps = skipped;
  r.spectrum = std::move(spectrum);
  return r;
}

AttackResult fsa_attack(const GradientOracle& oracle, const ImageTensor& x, int label,
                        const AttackConfig& cfg) {
  return fsa_attack(oracle, x, label, cfg, frequency_jnd(to_grayscale(x), DctBasis(cfg.block_size)));
}

AttackResult run_attack(const GradientOracle& oracle, const ImageTensor& x, int label,
                        const AttackConfig& cfg) {
  switch (cfg.mode) {
    case Mode::uniform: return uniform_attack(oracle, x, label, cfg);
    case Mode::ssa: return ssa_attack(oracle, x, label, cfg);
    case Mode::fsa: return fsa_attack(oracle, x, label, cfg);
  }
  throw std::logic_error("unknown mode");
}

}  // namespace jndadv
