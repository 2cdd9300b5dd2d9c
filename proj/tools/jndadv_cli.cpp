// Command-line front end: dataset generation, oracle training, JND maps,
// single-image attacks, quality evaluation and batch experiments.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>

#include "jndadv/attacks.hpp"
#include "jndadv/dct.hpp"
#include "jndadv/harness.hpp"
#include "jndadv/iqa.hpp"
#include "jndadv/jnd_frequency.hpp"
#include "jndadv/jnd_spatial.hpp"
#include "jndadv/oracle.hpp"
#include "jndadv/toy_dataset.hpp"

namespace fs = std::filesystem;
using namespace jndadv;

namespace {

struct DatasetArgs {
  ToyDatasetOptions options;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--dataset-seed", options.seed, "Toy dataset seed")->capture_default_str();
    cmd->add_option("--train", options.train_count, "Training images")->capture_default_str();
    cmd->add_option("--test", options.test_count, "Test images")->capture_default_str();
    cmd->add_option("--size", options.size, "Image side in pixels")->capture_default_str();
  }
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

int make_dataset(const DatasetArgs& args, const fs::path& dir) {
  fs::create_directories(dir);
  const Dataset data = make_toy_dataset(args.options);
  std::ofstream labels = open_output(dir / "labels.csv");
  labels << "file,label,split\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const bool train = data.splits[i] == Split::train;
    char name[64];
    std::snprintf(name, sizeof(name), "%s_%05zu.%s", train ? "train" : "test", i,
                  data.images[i].channels() == 1 ? "pgm" : "ppm");
    save_pnm(data.images[i], dir / name);
    labels << name << "," << data.labels[i] << "," << (train ? "train" : "test") << "\n";
  }
  std::cout << "wrote " << data.size() << " images to " << dir << "\n";
  return 0;
}

int train_oracle(const DatasetArgs& args, TinyArchitecture arch, const TrainOptions& opts,
                 const fs::path& out) {
  arch.input = Shape{args.options.size, args.options.size, args.options.channels};
  const Dataset data = make_toy_dataset(args.options);
  TinyClassifier model(arch, opts.seed);
  const TrainReport report = train(model, data, opts);
  for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
    std::cout << "epoch " << (e + 1) << " loss " << report.epoch_loss[e] << "\n";
  }
  std::cout << "train accuracy " << report.train_accuracy << "\n"
            << "test accuracy " << report.test_accuracy << "\n";
  model.save(out);
  return 0;
}

int jnd_map(const std::string& mode, const fs::path& in, const fs::path& pgm, const fs::path& csv,
            double scale, int block) {
  const GrayImage gray = to_grayscale(load_pnm(in));
  if (mode == "spatial") {
    const GrayImage jnd = spatial_jnd(gray);
    if (!pgm.empty()) {
      GrayImage vis = jnd;
      for (double& v : vis.data()) v *= scale;
      save_pnm(from_gray(vis), pgm);
    }
    if (!csv.empty()) {
      std::ofstream out = open_output(csv);
      out << "row,col,threshold\n";
      for (int y = 0; y < jnd.height(); ++y) {
        for (int x = 0; x < jnd.width(); ++x) out << y << "," << x << "," << jnd.at(y, x) << "\n";
      }
    }
    return 0;
  }
  if (mode == "frequency") {
    const JndMapF jnd = frequency_jnd(gray, DctBasis(block));
    std::ofstream out = open_output(csv.empty() ? fs::path("/dev/stdout") : csv);
    out << "block_row,block_col,u,v,threshold\n";
    for (int by = 0; by < jnd.blocks_y(); ++by) {
      for (int bx = 0; bx < jnd.blocks_x(); ++bx) {
        for (int u = 0; u < block; ++u) {
          for (int v = 0; v < block; ++v) {
            out << by << "," << bx << "," << u << "," << v << "," << jnd.at(by, bx, u, v) << "\n";
          }
        }
      }
    }
    return 0;
  }
  throw std::invalid_argument("jnd-map: --mode must be spatial or frequency");
}

int attack(AttackConfig cfg, const std::string& method, const std::string& mode, const fs::path& oracle_path,
           const fs::path& in, int label, const fs::path& out, const fs::path& residue, double residue_scale) {
  cfg.method = parse_method(method);
  cfg.mode = parse_mode(mode);
  const TinyClassifier oracle = TinyClassifier::load(oracle_path);
  const ImageTensor clean = load_pnm(in);
  const AttackResult r = run_attack(oracle, clean, label, cfg);
  save_pnm(r.adversarial, out);
  if (!residue.empty()) {
    ImageTensor vis = r.perturbation;
    for (double& v : vis.data()) v = 127.5 + residue_scale * v;
    save_pnm(vis, residue);
  }
  const IqaScore q = evaluate_quality(clean, r.adversarial);
  std::cout << "clean prediction " << oracle.predict(clean) << "\n"
            << "adversarial prediction " << oracle.predict(r.adversarial) << "\n"
            << "iterations " << r.iterations_used << "\n"
            << "substitute fooled " << (r.substitute_fooled ? "yes" : "no") << "\n"
            << "psnr " << q.psnr << " ssim " << q.ssim << "\n";
  return 0;
}

int evaluate(const fs::path& ref, const fs::path& test) {
  const IqaScore q = evaluate_quality(load_pnm(ref), load_pnm(test));
  std::cout << std::setprecision(10) << q.psnr << "," << q.ssim << "," << q.ms_ssim3 << "\n";
  return 0;
}

int experiment(const fs::path& config, const fs::path& out_override) {
  const ExperimentSpec spec = load_experiment(config);
  const auto reports = run_experiment_spec(spec);
  const fs::path out = out_override.empty() ? spec.output : out_override;
  if (out.empty()) {
    std::cout << format_report(reports);
  } else {
    emit_report(reports, out);
  }
  if (!spec.tradeoff.empty()) {
    std::ofstream t(spec.tradeoff, std::ios::binary);
    t << format_tradeoff(reports);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perceptually constrained adversarial examples with JND budgets"};
  app.require_subcommand(1);

  DatasetArgs dataset_args;
  fs::path dataset_dir;
  auto* ds = app.add_subcommand("make-dataset", "Write the toy dataset as PNM files");
  dataset_args.add_to(ds);
  ds->add_option("--out-dir", dataset_dir, "Output directory")->required();

  DatasetArgs train_args;
  TinyArchitecture arch;
  TrainOptions train_opts;
  fs::path train_out;
  auto* tr = app.add_subcommand("train-oracle", "Train a TinyClassifier on the toy dataset");
  train_args.add_to(tr);
  tr->add_option("--seed", train_opts.seed, "Initialization and shuffling seed")->capture_default_str();
  tr->add_option("--epochs", train_opts.epochs)->capture_default_str();
  tr->add_option("--lr", train_opts.learning_rate)->capture_default_str();
  tr->add_option("--batch", train_opts.batch_size)->capture_default_str();
  tr->add_option("--conv1", arch.conv1_maps, "First conv layer width")->capture_default_str();
  tr->add_option("--conv2", arch.conv2_maps, "Second conv layer width")->capture_default_str();
  tr->add_option("--out", train_out, "Checkpoint path")->required();

  std::string jnd_mode = "spatial";
  fs::path jnd_in, jnd_pgm, jnd_csv;
  double jnd_scale = 4.0;
  int jnd_block = kDefaultBlockSize;
  auto* jm = app.add_subcommand("jnd-map", "Compute a spatial or frequency JND map");
  jm->add_option("--mode", jnd_mode)->check(CLI::IsMember({"spatial", "frequency"}))->capture_default_str();
  jm->add_option("--in", jnd_in, "Input PGM/PPM")->required()->check(CLI::ExistingFile);
  jm->add_option("--pgm", jnd_pgm, "Spatial map visualization (values x scale, clamped)");
  jm->add_option("--scale", jnd_scale, "Visualization scale")->capture_default_str();
  jm->add_option("--csv", jnd_csv, "Exact CSV dump");
  jm->add_option("--block", jnd_block, "DCT block size")->capture_default_str();

  AttackConfig cfg;
  std::string method = "fgsm";
  std::string mode = "uniform";
  fs::path oracle_path, attack_in, attack_out, residue;
  int label = 0;
  double residue_scale = 4.0;
  auto* at = app.add_subcommand("attack", "Attack one image with a substitute oracle");
  at->add_option("--method", method)->check(CLI::IsMember({"fgsm", "mim", "dim"}))->capture_default_str();
  at->add_option("--mode", mode)->check(CLI::IsMember({"uniform", "ssa", "fsa"}))->capture_default_str();
  at->add_option("--epsilon", cfg.epsilon)->capture_default_str();
  at->add_option("--alpha0", cfg.alpha0)->capture_default_str();
  at->add_option("--beta0", cfg.beta0)->capture_default_str();
  at->add_option("--T", cfg.iterations)->capture_default_str();
  at->add_option("--mu", cfg.mu)->capture_default_str();
  at->add_option("--p", cfg.p)->capture_default_str();
  at->add_option("--seed", cfg.seed)->capture_default_str();
  at->add_option("--block", cfg.block_size)->capture_default_str();
  at->add_option("--oracle", oracle_path, "Substitute checkpoint")->required()->check(CLI::ExistingFile);
  at->add_option("--in", attack_in, "Clean PGM/PPM")->required()->check(CLI::ExistingFile);
  at->add_option("--label", label, "True class")->required();
  at->add_option("--out", attack_out, "Adversarial image")->required();
  at->add_option("--residue", residue, "Perturbation visualization (127.5 + scale * residue)");
  at->add_option("--residue-scale", residue_scale)->capture_default_str();

  fs::path eval_ref, eval_test;
  auto* ev = app.add_subcommand("evaluate", "Print psnr,ssim,msssim3 for an image pair");
  ev->add_option("--ref", eval_ref)->required()->check(CLI::ExistingFile);
  ev->add_option("--test", eval_test)->required()->check(CLI::ExistingFile);

  fs::path config, experiment_out;
  auto* ex = app.add_subcommand("experiment", "Run attacks over the filtered test split");
  ex->add_option("--config", config)->required()->check(CLI::ExistingFile);
  ex->add_option("--out", experiment_out, "CSV report (overrides the config's output)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ds) return make_dataset(dataset_args, dataset_dir);
    if (*tr) return train_oracle(train_args, arch, train_opts, train_out);
    if (*jm) return jnd_map(jnd_mode, jnd_in, jnd_pgm, jnd_csv, jnd_scale, jnd_block);
    if (*at) return attack(cfg, method, mode, oracle_path, attack_in, label, attack_out, residue, residue_scale);
    if (*ev) return evaluate(eval_ref, eval_test);
    if (*ex) return experiment(config, experiment_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
