// Copyright 2026 The Hash-Comb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// hashcomb: experiment runner and protocol utilities.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hashcomb/dataset.h"
#include "hashcomb/digest.h"
#include "hashcomb/experiment.h"
#include "hashcomb/negotiation.h"
#include "hashcomb/privacy.h"
#include "hashcomb/quantization.h"
#include "json.hpp"

namespace {

using namespace hashcomb;

struct RunFlags {
  std::string config;
  std::optional<std::string> dataset;
  std::optional<std::string> label_column;
  std::optional<std::string> positive_label;
  std::optional<std::string> mode;
  std::optional<long> epochs;
  std::optional<long> epochs_per_round;
  std::optional<int> rounds;
  std::optional<int> nodes;
  std::optional<double> fraction;
  std::optional<std::string> level;
  std::optional<std::uint64_t> seed;
  std::optional<double> learning_rate;
  std::optional<int> threads;
  std::optional<std::string> out;
  std::optional<std::vector<double>> hc_range;
  std::optional<double> dp_sigma2;
  bool no_timing = false;
  bool privacy = false;
  bool quiet = false;
};

int DoRun(const RunFlags& f) {
  RunConfig c;
  try {
    if (!f.config.empty()) c = LoadConfigFile(f.config, c);
    if (f.dataset) c.dataset_path = *f.dataset;
    if (f.label_column) c.label_column = *f.label_column;
    if (f.positive_label) c.positive_label = *f.positive_label;
    if (f.mode) c.mode = ParseRunMode(*f.mode);
    if (f.epochs) c.epochs = *f.epochs;
    if (f.epochs_per_round) c.epochs_per_round = *f.epochs_per_round;
    if (f.rounds) c.rounds = *f.rounds;
    if (f.nodes) c.nodes = *f.nodes;
    if (f.fraction) c.fraction = *f.fraction;
    if (f.level) c.hc.fixed_level = ParseLevelPolicy(*f.level);
    if (f.seed) c.seed = *f.seed;
    if (f.learning_rate) c.learning_rate = *f.learning_rate;
    if (f.threads) c.threads = *f.threads;
    if (f.out) c.output_dir = *f.out;
    if (f.hc_range) {
      if (f.hc_range->size() != 2) throw ConfigError("--hc-range takes MIN MAX");
      c.hc.range = std::make_pair((*f.hc_range)[0], (*f.hc_range)[1]);
    }
    if (f.dp_sigma2) c.dp.sigma2 = *f.dp_sigma2;
    if (f.no_timing) c.timing = false;
    if (f.privacy) c.privacy.enabled = true;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return RunAndWrite(c, std::cerr, f.quiet ? nullptr : &std::cerr);
}

int DoSolveBias(double target, int max_level) {
  try {
    const double p = SolveBias(target, max_level);
    std::cout << std::setprecision(12) << p << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "solve-bias: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int DoNegotiate(int parties, int threshold, const std::vector<double>& ranges,
                std::uint64_t seed, int max_level, double target,
                const std::string& transcript_path) {
  try {
    std::vector<LocalRange> local;
    std::mt19937_64 rng(seed);
    if (ranges.empty()) {
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (int i = 0; i < parties; ++i) {
        double a = u(rng);
        double b = u(rng);
        if (a > b) std::swap(a, b);
        local.push_back({a, b});
      }
    } else {
      if (ranges.size() != 2 * static_cast<std::size_t>(parties)) {
        throw std::invalid_argument("--ranges needs 2 values per party");
      }
      for (int i = 0; i < parties; ++i) {
        local.push_back({ranges[2 * i], ranges[2 * i + 1]});
      }
    }
    NegotiationOptions opt;
    opt.threshold = threshold;
    opt.max_level = max_level;
    opt.target_mean_level = target;
    const NegotiationResult result = RunNegotiation(local, opt, rng);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!transcript_path.empty() && transcript_path != "-") {
      file.open(transcript_path);
      if (!file) throw std::invalid_argument("cannot write " + transcript_path);
      out = &file;
    }
    for (const TranscriptRecord& r : result.transcript) {
      nlohmann::json line = {{"round", r.round},
                             {"sender", r.sender},
                             {"receiver", r.receiver},
                             {"step", std::string(StepName(r.step))},
                             {"payload_sha256", r.payload_digest}};
      *out << line.dump() << "\n";
    }
    std::cerr << "coordinator: party " << result.coordinator << "\n";
    for (std::size_t i = 0; i < result.schemes.size(); ++i) {
      const auto pub = SerializePublicScheme(result.schemes[i]);
      std::cerr << "party " << i + 1 << " scheme fingerprint "
                << ToHex(Sha256(pub)) << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "negotiate: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int DoPrivacyReport(const std::string& sample_file, std::size_t uniform_n,
                    const std::vector<double>& range, int level,
                    std::size_t index, std::optional<double> replacement,
                    const std::vector<double>& alphas, std::uint64_t seed) {
  try {
    if (range.size() != 2) throw std::invalid_argument("--range takes MIN MAX");
    std::vector<double> sample;
    if (!sample_file.empty()) {
      std::ifstream in(sample_file);
      if (!in) throw std::invalid_argument("cannot read " + sample_file);
      double v;
      while (in >> v) sample.push_back(v);
    } else {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(range[0], range[1]);
      for (std::size_t i = 0; i < uniform_n; ++i) sample.push_back(u(rng));
    }
    const QuantizationScheme scheme = QuantizationScheme::FromSourceRange(
        range[0], range[1], 0.0, std::max(level, kDefaultMaxLevel), 1.0, Salt{});
    const auto report = AdjacentDivergence(
        sample, index, replacement.value_or(range[1]), scheme, level, alphas);
    std::cout << ReportToJson(report) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "privacy-report: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int DoSynth(std::size_t rows, std::size_t features, double noise,
            std::uint64_t seed, const std::string& out_path) {
  try {
    const Dataset data = MakeSyntheticDataset(rows, features, noise, seed);
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot write " + out_path);
    WriteCsv(data, out);
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "synth: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hash-Comb federated learning experiments"};
  app.require_subcommand(1);

  RunFlags run;
  auto* run_cmd = app.add_subcommand("run", "Train and evaluate one experiment");
  run_cmd->add_option("--config", run.config, "JSON config; flags override it");
  run_cmd->add_option("--dataset", run.dataset, "CSV file with a header row");
  run_cmd->add_option("--label-column", run.label_column);
  run_cmd->add_option("--positive-label", run.positive_label);
  run_cmd->add_option("--mode", run.mode,
                      "monolithic | fedavg | fedavg_hc | fedavg_dp");
  run_cmd->add_option("--epochs", run.epochs, "Monolithic SGD updates");
  run_cmd->add_option("--epochs-per-round", run.epochs_per_round);
  run_cmd->add_option("--rounds", run.rounds);
  run_cmd->add_option("--nodes", run.nodes);
  run_cmd->add_option("--fraction", run.fraction, "Train share per node");
  run_cmd->add_option("--level", run.level, "fixed:K or sampled");
  run_cmd->add_option("--seed", run.seed);
  run_cmd->add_option("--learning-rate", run.learning_rate);
  run_cmd->add_option("--threads", run.threads);
  run_cmd->add_option("--hc-range", run.hc_range, "MIN MAX")->expected(2);
  run_cmd->add_option("--dp-sigma2", run.dp_sigma2);
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_flag("--no-timing", run.no_timing, "Write wall_ms as 0");
  run_cmd->add_flag("--privacy", run.privacy, "Also write privacy.json");
  run_cmd->add_flag("--quiet", run.quiet);

  double target = 8.0;
  int max_level = kDefaultMaxLevel;
  auto* bias_cmd =
      app.add_subcommand("solve-bias", "Coin bias for a target mean level");
  bias_cmd->add_option("--target", target)->required();
  bias_cmd->add_option("--L", max_level);

  int parties = 4;
  int threshold = 1;
  std::vector<double> ranges;
  std::uint64_t seed = 1;
  std::string transcript = "-";
  double neg_target = 8.0;
  int neg_level = kDefaultMaxLevel;
  auto* neg_cmd = app.add_subcommand(
      "negotiate", "Simulate the parameter negotiation and dump the transcript");
  neg_cmd->add_option("--parties", parties);
  neg_cmd->add_option("--threshold", threshold);
  neg_cmd->add_option("--ranges", ranges, "MIN MAX per party");
  neg_cmd->add_option("--seed", seed);
  neg_cmd->add_option("--L", neg_level);
  neg_cmd->add_option("--target", neg_target);
  neg_cmd->add_option("--transcript", transcript, "JSONL output, - for stdout");

  std::string sample_file;
  std::size_t uniform_n = 1000;
  std::vector<double> range{-1.0, 1.0};
  int level = 8;
  std::size_t index = 0;
  std::optional<double> replacement;
  std::vector<double> alphas{1.5, 2.0, 4.0, 8.0, 32.0};
  std::uint64_t privacy_seed = 1;
  auto* priv_cmd = app.add_subcommand(
      "privacy-report", "Renyi divergence between adjacent quantized samples");
  priv_cmd->add_option("--sample", sample_file, "Whitespace-separated values");
  priv_cmd->add_option("--uniform", uniform_n, "Uniform sample size");
  priv_cmd->add_option("--range", range, "MIN MAX")->expected(2);
  priv_cmd->add_option("--level", level);
  priv_cmd->add_option("--index", index, "Sample entry to replace");
  priv_cmd->add_option("--replacement", replacement);
  priv_cmd->add_option("--alphas", alphas);
  priv_cmd->add_option("--seed", privacy_seed);

  std::size_t rows = 1000;
  std::size_t features = 10;
  double noise = 0.05;
  std::uint64_t synth_seed = 1;
  std::string synth_out;
  auto* synth_cmd =
      app.add_subcommand("synth", "Write a synthetic binary data set");
  synth_cmd->add_option("--rows", rows);
  synth_cmd->add_option("--features", features);
  synth_cmd->add_option("--label-noise", noise);
  synth_cmd->add_option("--seed", synth_seed);
  synth_cmd->add_option("--out", synth_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  if (*run_cmd) return DoRun(run);
  if (*bias_cmd) return DoSolveBias(target, max_level);
  if (*neg_cmd) {
    return DoNegotiate(parties, threshold, ranges, seed, neg_level, neg_target,
                       transcript);
  }
  if (*priv_cmd) {
    return DoPrivacyReport(sample_file, uniform_n, range, level, index,
                           replacement, alphas, privacy_seed);
  }
  if (*synth_cmd) {
    return DoSynth(rows, features, noise, synth_seed, synth_out);
  }
  return kExitConfigError;
}
