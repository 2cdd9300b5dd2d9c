#include "jndadv/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace jndadv {

Dataset filter_dataset(const Dataset& data, const std::vector<Victim>& victims) {
  Dataset out;
  out.num_classes = data.num_classes;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const bool all_correct = std::all_of(victims.begin(), victims.end(), [&](const Victim& v) {
      return v.oracle->predict(data.images[i]) == data.labels[i];
    });
    if (all_correct) out.add(data.images[i], data.labels[i], data.splits[i]);
  }
  if (out.size() == 0) throw std::runtime_error("filter_dataset: no sample is classified correctly by every victim");
  return out;
}

std::uint64_t image_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 of (seed, index)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<ImageOutcome> attack_dataset(const AttackConfig& cfg, const GradientOracle& substitute,
                                         const std::vector<Victim>& victims, const Dataset& data,
                                         const RunOptions& options) {
  cfg.validate();
  std::vector<ImageOutcome> outcomes(data.size());
  auto work = [&](std::size_t i) {
    AttackConfig local = cfg;
    local.seed = image_seed(cfg.seed, i);
    ImageOutcome& out = outcomes[i];
    out.attack = run_attack(substitute, data.images[i], data.labels[i], local);
    for (const Victim& v : victims) {
      out.victim_fooled.push_back(v.oracle->predict(out.attack.adversarial) != data.labels[i]);
    }
    out.quality = evaluate_quality(data.images[i], out.attack.adversarial);
  };

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, data.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < data.size(); ++i) work(i);
    return outcomes;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < data.size(); i = next++) {
          try {
            work(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return outcomes;
}

AsrReport summarize(const AttackConfig& cfg, const std::vector<Victim>& victims,
                    const std::vector<ImageOutcome>& outcomes) {
  AsrReport r;
  r.config = cfg;
  r.n = outcomes.size();
  for (const Victim& v : victims) r.victims.push_back(v.name);
  r.victim_asr.assign(victims.size(), 0.0);
  if (outcomes.empty()) return r;
  const auto n = static_cast<double>(outcomes.size());
  double sub = 0.0;
  for (const ImageOutcome& o : outcomes) {
    for (std::size_t v = 0; v < victims.size(); ++v) r.victim_asr[v] += o.victim_fooled[v] ? 1.0 : 0.0;
    r.mean_quality.psnr += o.quality.psnr;
    r.mean_quality.ssim += o.quality.ssim;
    r.mean_quality.ms_ssim3 += o.quality.ms_ssim3;
    sub += o.attack.substitute_fooled ? 1.0 : 0.0;
  }
  for (double& a : r.victim_asr) a /= n;
  r.mean_quality.psnr /= n;
  r.mean_quality.ssim /= n;
  r.mean_quality.ms_ssim3 /= n;
  r.substitute_asr = sub / n;
  double total = 0.0;
  for (double a : r.victim_asr) total += a;
  r.avg_asr = victims.empty() ? 0.0 : total / static_cast<double>(victims.size());
  return r;
}

std::vector<AsrReport> run_experiment(const std::vector<AttackConfig>& configs,
                                      const GradientOracle& substitute,
                                      const std::vector<Victim>& victims, const Dataset& data,
                                      const RunOptions& options) {
  if (data.size() == 0) throw std::invalid_argument("run_experiment: empty dataset");
  std::vector<AsrReport> reports;
  for (const AttackConfig& cfg : configs) {
    reports.push_back(summarize(cfg, victims, attack_dataset(cfg, substitute, victims, data, options)));
  }
  return reports;
}

std::vector<AsrReport> sweep(const AttackConfig& base, const std::vector<double>& budgets,
                             const GradientOracle& substitute, const std::vector<Victim>& victims,
                             const Dataset& data, const RunOptions& options) {
  std::vector<AttackConfig> configs;
  for (double b : budgets) {
    AttackConfig cfg = base;
    cfg.set_budget(b);
    configs.push_back(cfg);
  }
  return run_experiment(configs, substitute, victims, data, options);
}

// ---------------------------------------------------------------- output

namespace {

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string format_report(const std::vector<AsrReport>& reports) {
  std::ostringstream os;
  os << kReportHeader << "\n";
  for (const AsrReport& r : reports) {
    const std::string prefix = to_string(r.config.method) + "," + to_string(r.config.mode) + "," +
                               number(r.config.budget()) + ",";
    const std::string quality = number(r.mean_quality.psnr) + "," + number(r.mean_quality.ssim) + "," +
                                number(r.mean_quality.ms_ssim3) + "," + std::to_string(r.n);
    for (std::size_t v = 0; v < r.victims.size(); ++v) {
      os << prefix << r.victims[v] << "," << number(r.victim_asr[v]) << "," << quality << "\n";
    }
    os << prefix << "avg," << number(r.avg_asr) << "," << quality << "\n";
  }
  return os.str();
}

void emit_report(const std::vector<AsrReport>& reports, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_report: cannot write " + path.string());
  out << format_report(reports);
  if (!out) throw std::runtime_error("emit_report: write failed for " + path.string());
}

std::string format_tradeoff(const std::vector<AsrReport>& reports) {
  std::ostringstream os;
  std::string current;
  for (const AsrReport& r : reports) {
    const std::string key = to_string(r.config.method) + "-" + to_string(r.config.mode);
    if (key != current) {
      if (!current.empty()) os << "\n\n";
      os << "# " << key << "\n# param avg_asr psnr ssim msssim3\n";
      current = key;
    }
    os << number(r.config.budget()) << " " << number(r.avg_asr) << " " << number(r.mean_quality.psnr)
       << " " << number(r.mean_quality.ssim) << " " << number(r.mean_quality.ms_ssim3) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------- config files

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw std::invalid_argument("config: '" + key + "' expects a number, got '" + value + "'");
  }
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw std::invalid_argument("config: '" + key + "' expects a non-negative integer, got '" + value + "'");
  }
  return v;
}

}  // namespace

AttackConfig parse_attack_line(const std::string& text, std::vector<double>* sweep_values) {
  AttackConfig cfg;
  std::istringstream in(text);
  std::string item;
  while (in >> item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "method") {
      cfg.method = parse_method(value);
    } else if (key == "mode") {
      cfg.mode = parse_mode(value);
    } else if (key == "epsilon") {
      cfg.epsilon = to_double(key, value);
    } else if (key == "alpha0") {
      cfg.alpha0 = to_double(key, value);
    } else if (key == "beta0") {
      cfg.beta0 = to_double(key, value);
    } else if (key == "T") {
      cfg.iterations = static_cast<int>(to_uint(key, value));
    } else if (key == "mu") {
      cfg.mu = to_double(key, value);
    } else if (key == "p") {
      cfg.p = to_double(key, value);
    } else if (key == "seed") {
      cfg.seed = to_uint(key, value);
    } else if (key == "block") {
      cfg.block_size = static_cast<int>(to_uint(key, value));
    } else if (key == "values" && sweep_values) {
      std::istringstream list(value);
      std::string v;
      while (std::getline(list, v, ',')) sweep_values->push_back(to_double(key, trim(v)));
    } else {
      throw std::invalid_argument("config: unknown attack key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentSpec parse_experiment(const std::string& text, const std::filesystem::path& base_dir) {
  ExperimentSpec spec;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "dataset.seed") {
      spec.dataset.seed = to_uint(key, value);
    } else if (key == "dataset.train") {
      spec.dataset.train_count = static_cast<int>(to_uint(key, value));
    } else if (key == "dataset.test") {
      spec.dataset.test_count = static_cast<int>(to_uint(key, value));
    } else if (key == "dataset.size") {
      spec.dataset.size = static_cast<int>(to_uint(key, value));
    } else if (key == "dataset.noise") {
      spec.dataset.noise_sigma = to_double(key, value);
    } else if (key == "substitute") {
      spec.substitute = resolve(value);
    } else if (key == "victim") {
      spec.victims.push_back(resolve(value));
    } else if (key == "threads") {
      spec.threads = static_cast<unsigned>(to_uint(key, value));
    } else if (key == "output") {
      spec.output = resolve(value);
    } else if (key == "tradeoff") {
      spec.tradeoff = resolve(value);
    } else if (key == "attack") {
      spec.attacks.push_back(parse_attack_line(value));
    } else if (key == "sweep") {
      SweepSpec s;
      s.base = parse_attack_line(value, &s.values);
      if (s.values.empty()) throw std::invalid_argument("config: sweep needs values=a,b,...");
      spec.sweeps.push_back(std::move(s));
    } else {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (spec.substitute.empty()) throw std::invalid_argument("config: missing 'substitute'");
  if (spec.victims.empty()) throw std::invalid_argument("config: at least one 'victim' is required");
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment(buf.str(), path.parent_path());
}

std::vector<AsrReport> run_experiment_spec(const ExperimentSpec& spec) {
  const TinyClassifier substitute = TinyClassifier::load(spec.substitute);
  std::vector<TinyClassifier> victim_models;
  for (const auto& p : spec.victims) victim_models.push_back(TinyClassifier::load(p));
  std::vector<Victim> victims;
  for (std::size_t i = 0; i < victim_models.size(); ++i) {
    victims.push_back({spec.victims[i].stem().string(), &victim_models[i]});
  }
  const Dataset data = filter_dataset(make_toy_dataset(spec.dataset).subset(Split::test), victims);
  const RunOptions options{spec.threads};

  std::vector<AsrReport> reports = run_experiment(spec.attacks, substitute, victims, data, options);
  for (const SweepSpec& s : spec.sweeps) {
    auto part = sweep(s.base, s.values, substitute, victims, data, options);
    reports.insert(reports.end(), part.begin(), part.end());
  }
  return reports;
}

}  // namespace jndadv
