#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "jndadv/attacks.hpp"
#include "jndadv/iqa.hpp"
#include "jndadv/oracle.hpp"
#include "jndadv/toy_dataset.hpp"

namespace jndadv {

struct Victim {
  std::string name;
  const GradientOracle* oracle = nullptr;
};

// Keeps the samples that every victim classifies correctly. Throws
// std::runtime_error if nothing is left.
Dataset filter_dataset(const Dataset& data, const std::vector<Victim>& victims);

struct ImageOutcome {
  AttackResult attack;
  std::vector<bool> victim_fooled;  // victim argmax != true label
  IqaScore quality;                 // clean vs adversarial
};

struct AsrReport {
  AttackConfig config;
  std::vector<std::string> victims;
  std::vector<double> victim_asr;
  double avg_asr = 0.0;
  IqaScore mean_quality;
  double substitute_asr = 0.0;
  std::size_t n = 0;
};

struct RunOptions {
  unsigned threads = 0;  // 0: hardware concurrency
};

// Per-image attack seed derived from the config seed and the image index.
std::uint64_t image_seed(std::uint64_t seed, std::size_t index);

std::vector<ImageOutcome> attack_dataset(const AttackConfig& cfg, const GradientOracle& substitute,
                                         const std::vector<Victim>& victims, const Dataset& data,
                                         const RunOptions& options = {});

AsrReport summarize(const AttackConfig& cfg, const std::vector<Victim>& victims,
                    const std::vector<ImageOutcome>& outcomes);

std::vector<AsrReport> run_experiment(const std::vector<AttackConfig>& configs,
                                      const GradientOracle& substitute,
                                      const std::vector<Victim>& victims, const Dataset& data,
                                      const RunOptions& options = {});

// One report per budget value, in grid order; the budget replaces the
// parameter that is active for base.mode.
std::vector<AsrReport> sweep(const AttackConfig& base, const std::vector<double>& budgets,
                             const GradientOracle& substitute, const std::vector<Victim>& victims,
                             const Dataset& data, const RunOptions& options = {});

inline constexpr const char* kReportHeader = "method,mode,param,victim,asr,psnr,ssim,msssim3,n";

std::string format_report(const std::vector<AsrReport>& reports);
void emit_report(const std::vector<AsrReport>& reports, const std::filesystem::path& path);

// Whitespace-separated columns "param avg_asr psnr ssim msssim3", one block
// per (method, mode) separated by two blank lines (gnuplot indices).
std::string format_tradeoff(const std::vector<AsrReport>& reports);

// ---------------------------------------------------------------- config files
//
//   # comment
//   dataset.seed = 7
//   dataset.train = 1600
//   dataset.test = 400
//   dataset.size = 32
//   substitute = sub.ckpt
//   victim = victim_a.ckpt          (repeatable)
//   threads = 1
//   output = report.csv
//   tradeoff = tradeoff.dat         (optional)
//   attack = method=mim mode=ssa alpha0=2.2 T=10 mu=1 p=0.7 seed=3
//   sweep = method=mim mode=fsa values=2,4,6,8 T=10
//
// Relative paths resolve against the config file's directory.

struct SweepSpec {
  AttackConfig base;
  std::vector<double> values;
};

struct ExperimentSpec {
  ToyDatasetOptions dataset;
  std::filesystem::path substitute;
  std::vector<std::filesystem::path> victims;
  unsigned threads = 0;
  std::filesystem::path output;
  std::filesystem::path tradeoff;
  std::vector<AttackConfig> attacks;
  std::vector<SweepSpec> sweeps;
};

AttackConfig parse_attack_line(const std::string& text, std::vector<double>* sweep_values = nullptr);
ExperimentSpec parse_experiment(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentSpec load_experiment(const std::filesystem::path& path);

// Runs every attack and sweep of the spec on the filtered test split and
// returns the reports: attacks first, then sweeps, each in file order.
std::vector<AsrReport> run_experiment_spec(const ExperimentSpec& spec);

}  // namespace jndadv
