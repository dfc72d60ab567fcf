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

#ifndef HASHCOMB_EXPERIMENT_H_
#define HASHCOMB_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hashcomb/dataset.h"
#include "hashcomb/federation.h"
#include "hashcomb/quantization.h"

namespace hashcomb {

// Invalid or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunMode { kMonolithic, kFedAvg, kFedAvgHc, kFedAvgDp };

std::string_view RunModeName(RunMode mode);
// Throws ConfigError for an unknown name.
RunMode ParseRunMode(std::string_view name);

// Process exit codes of the command line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitDivergence = 2,
};

struct HcConfig {
  // Fixed level for every parameter; biased-coin sampling when empty.
  std::optional<int> fixed_level;
  int max_level = 16;
  double target_mean_level = 8.0;
  std::optional<double> selection_p;
  // Range each node reports to the negotiation. Empty: the range of the
  // initial global parameters.
  std::optional<std::pair<double, double>> range;
  // Enlargement; empty selects (x_max - x_min) / 2.
  std::optional<double> delta;
};

// "fixed:K" or "sampled". Throws ConfigError otherwise.
std::optional<int> ParseLevelPolicy(std::string_view text);
std::string LevelPolicyName(const std::optional<int>& fixed_level);

struct PrivacyConfig {
  bool enabled = false;
  int level = 8;
  std::vector<double> alphas = {1.5, 2.0, 4.0, 8.0, 32.0};
};

struct RunConfig {
  std::string name = "run";
  std::string dataset_path;
  std::string label_column;
  std::optional<std::string> positive_label;
  char delimiter = ',';

  RunMode mode = RunMode::kMonolithic;
  std::uint64_t seed = 1;
  double test_fraction = 0.25;
  double learning_rate = 0.05;
  std::vector<int> hidden_layers = DefaultHiddenLayers();

  long epochs = 25000;  // monolithic only

  int nodes = 4;
  int rounds = 40;
  long epochs_per_round = 1000;
  double fraction = 0.25;
  bool resample_each_round = true;
  int threads = 0;

  HcConfig hc;
  DpConfig dp;
  PrivacyConfig privacy;

  std::string output_dir = "runs/run";
  // false writes wall_ms = 0 so metrics files are byte-reproducible.
  bool timing = true;
};

// Throws ConfigError describing the first problem.
void ValidateRunConfig(const RunConfig& config);

// Fields absent from the JSON keep the values already in `base`. Throws
// ConfigError on malformed JSON, unknown keys or wrong types.
RunConfig ApplyConfigJson(std::string_view json_text, RunConfig base = {});
RunConfig LoadConfigFile(const std::string& path, RunConfig base = {});
std::string ConfigToJson(const RunConfig& config);

FederationConfig ToFederationConfig(const RunConfig& config);

struct MetricsRow {
  int round = 0;
  RunMode mode = RunMode::kMonolithic;
  double accuracy = 0.0;
  double f1 = 0.0;
  double wall_ms = 0.0;
};

// Header: round,mode,accuracy,f1,wall_ms
void WriteMetricsCsv(const std::vector<MetricsRow>& rows, std::ostream& out);

struct RunOutcome {
  std::vector<MetricsRow> rows;
  double best_f1 = 0.0;
  int best_round = 0;
  double final_accuracy = 0.0;
  double final_f1 = 0.0;
  std::string manifest_json;
  std::string privacy_json;  // empty unless requested
  // Negotiated scheme (Hash-Comb mode). Kept in memory only.
  std::optional<QuantizationScheme> scheme;
};

// Loads config.dataset_path unless `dataset` is given, splits, negotiates
// (Hash-Comb mode), trains and evaluates. Does not touch the filesystem
// beyond reading the dataset. Throws ConfigError, DatasetError or
// TrainingDivergence.
RunOutcome RunExperiment(const RunConfig& config,
                         const Dataset* dataset = nullptr,
                         std::ostream* log = nullptr);

// RunExperiment() plus metrics.csv, manifest.json (and privacy.json) in
// config.output_dir. Maps failures to an ExitCode and a diagnostic on
// `err`.
int RunAndWrite(const RunConfig& config, std::ostream& err,
                std::ostream* log = nullptr);

}  // namespace hashcomb

#endif  // HASHCOMB_EXPERIMENT_H_
