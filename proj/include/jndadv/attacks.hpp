#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "jndadv/dct.hpp"
#include "jndadv/jnd_frequency.hpp"
#include "jndadv/oracle.hpp"
#include "jndadv/tensor.hpp"

namespace jndadv {

// Gradient estimator g_est(x, y).
enum class Method { fgsm, mim, dim };
// How the estimated gradient is turned into a bounded step.
enum class Mode { uniform, ssa, fsa };

std::string to_string(Method method);
std::string to_string(Mode mode);
Method parse_method(const std::string& name);
Mode parse_mode(const std::string& name);

struct AttackConfig {
  Method method = Method::fgsm;
  Mode mode = Mode::uniform;
  double epsilon = 14.0;  // uniform L-inf budget, intensity units
  double alpha0 = 1.0;    // spatial JND scale, >= 1
  double beta0 = 1.0;     // frequency JND scale, > 0
  int iterations = 10;    // T
  double mu = 1.0;        // momentum decay (MIM, DIM)
  double p = 0.7;         // transform probability (DIM)
  std::uint64_t seed = 0;
  int block_size = kDefaultBlockSize;

  // The budget parameter that is active for `mode`.
  double budget() const;
  void set_budget(double value);
  void validate() const;
};

struct AttackResult {
  ImageTensor adversarial;
  ImageTensor perturbation;  // adversarial - clean
  int iterations_used = 0;
  int skipped_steps = 0;     // FSA steps with an all-zero frequency gradient
  bool substitute_fooled = false;
  std::optional<BlockSpectrum> spectrum;  // FSA only: unclamped X* after the last step
};

// Stateful gradient estimator: plain gradient (FGSM), L1-normalized momentum
// (MIM), or momentum over randomly transformed inputs (DIM).
class GradientEstimator {
 public:
  GradientEstimator(const GradientOracle& oracle, const AttackConfig& cfg);

  ImageTensor next(const ImageTensor& x, int label);

 private:
  const GradientOracle& oracle_;
  Method method_;
  double mu_;
  double p_;
  std::mt19937_64 rng_;
  ImageTensor momentum_;
};

ImageTensor fgsm_gradient(const GradientOracle& oracle, const ImageTensor& x, int label);

// g_{t+1} = mu * g_t + grad / ||grad||_1, with the normalized term dropped
// when ||grad||_1 < 1e-12. `state` holds g_t (empty means zero).
ImageTensor mim_gradient(ImageTensor& state, const GradientOracle& oracle, const ImageTensor& x,
                         int label, double mu);

// With probability p: resize each axis by a factor in [0.9, 1.1] (bilinear),
// then crop or replicate-pad back to the input size at a random offset.
ImageTensor dim_transform(const ImageTensor& x, double p, std::mt19937_64& rng);
ImageTensor dim_transform(const ImageTensor& x, double p, std::uint64_t seed);

AttackResult uniform_attack(const GradientOracle& oracle, const ImageTensor& x, int label,
                            const AttackConfig& cfg);

// Spatial structure-aware attack. The first overload computes the JND map
// from the grayscale clean image; the second takes the budget map directly.
AttackResult ssa_attack(const GradientOracle& oracle, const ImageTensor& x, int label,
                        const AttackConfig& cfg);
AttackResult ssa_attack(const GradientOracle& oracle, const ImageTensor& x, int label,
                        const AttackConfig& cfg, const GrayImage& jnd);

// Frequency structure-aware attack in the blockwise DCT domain.
AttackResult fsa_attack(const GradientOracle& oracle, const ImageTensor& x, int label,
                        const AttackConfig& cfg);
AttackResult fsa_attack(const GradientOracle& oracle, const ImageTensor& x, int label,
                        const AttackConfig& cfg, const JndMapF& jnd);

// Dispatches on cfg.mode.
AttackResult run_attack(const GradientOracle& oracle, const ImageTensor& x, int label,
                        const AttackConfig& cfg);

}  // namespace jndadv
