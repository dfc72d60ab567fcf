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

#include "hashcomb/experiment.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "hashcomb/codec.h"
#include "hashcomb/digest.h"
#include "hashcomb/metrics.h"
#include "hashcomb/mlp.h"
#include "hashcomb/negotiation.h"
#include "hashcomb/privacy.h"
#include "hashcomb/quantization.h"
#include "hashcomb/rng.h"
#include "json.hpp"

namespace hashcomb {
namespace {

using nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

void CheckKeys(const json& obj, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void Read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
void ReadOptional(const json& obj, const char* key, std::optional<T>& out,
                  const std::string& where) {
  if (!obj.contains(key)) return;
  if (obj.at(key).is_null()) {
    out.reset();
    return;
  }
  T value{};
  Read(obj, key, value, where);
  out = value;
}

json OptionalJson(const auto& opt) {
  return opt ? json(*opt) : json(nullptr);
}

std::string FileSha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  const Digest d = Sha256(bytes);
  return ToHex(d);
}

std::pair<double, double> ParameterRange(std::span<const double> params) {
  const auto [lo, hi] = std::minmax_element(params.begin(), params.end());
  return {*lo, *hi};
}

}  // namespace

std::string_view RunModeName(RunMode mode) {
  switch (mode) {
    case RunMode::kMonolithic:
      return "monolithic";
    case RunMode::kFedAvg:
      return "fedavg";
    case RunMode::kFedAvgHc:
      return "fedavg_hc";
    case RunMode::kFedAvgDp:
      return "fedavg_dp";
  }
  return "unknown";
}

RunMode ParseRunMode(std::string_view name) {
  for (RunMode m : {RunMode::kMonolithic, RunMode::kFedAvg, RunMode::kFedAvgHc,
                    RunMode::kFedAvgDp}) {
    if (RunModeName(m) == name) return m;
  }
  throw ConfigError("unknown mode '" + std::string(name) +
                    "' (monolithic, fedavg, fedavg_hc, fedavg_dp)");
}

std::optional<int> ParseLevelPolicy(std::string_view text) {
  if (text == "sampled") return std::nullopt;
  constexpr std::string_view kFixed = "fixed:";
  if (text.substr(0, kFixed.size()) == kFixed) {
    const std::string_view digits = text.substr(kFixed.size());
    int level = 0;
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), level);
    if (ec == std::errc() && ptr == digits.data() + digits.size() &&
        !digits.empty() && level >= 1) {
      return level;
    }
  }
  throw ConfigError("level policy must be 'sampled' or 'fixed:K', got '" +
                    std::string(text) + "'");
}

std::string LevelPolicyName(const std::optional<int>& fixed_level) {
  return fixed_level ? "fixed:" + std::to_string(*fixed_level) : "sampled";
}

void ValidateRunConfig(const RunConfig& c) {
  if (c.dataset_path.empty()) throw ConfigError("dataset path is required");
  if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) {
    throw ConfigError("test_fraction must be in (0, 1)");
  }
  if (!(c.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  for (int h : c.hidden_layers) {
    if (h < 1) throw ConfigError("hidden layer sizes must be positive");
  }
  if (c.output_dir.empty()) throw ConfigError("output_dir is required");
  if (c.mode == RunMode::kMonolithic) {
    if (c.epochs < 1) throw ConfigError("epochs must be >= 1");
  } else {
    try {
      ValidateFederationConfig(ToFederationConfig(c));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (c.mode == RunMode::kFedAvgHc) {
    const HcConfig& hc = c.hc;
    if (hc.max_level < 1 || hc.max_level > kMaxSupportedLevel) {
      throw ConfigError("hc.max_level must be in [1, " +
                        std::to_string(kMaxSupportedLevel) + "]");
    }
    if (hc.fixed_level && *hc.fixed_level > hc.max_level) {
      throw ConfigError("fixed level exceeds hc.max_level");
    }
    if (hc.selection_p && !(*hc.selection_p > 0.0 && *hc.selection_p <= 1.0)) {
      throw ConfigError("hc.selection_p must be in (0, 1]");
    }
    if (!hc.selection_p && !(hc.target_mean_level > 0.0 &&
                             hc.target_mean_level < hc.max_level)) {
      throw ConfigError("hc.target_mean_level must be in (0, max_level)");
    }
    if (hc.range && !(hc.range->first <= hc.range->second)) {
      throw ConfigError("hc.range must satisfy min <= max");
    }
    if (hc.delta && !(*hc.delta >= 0.0)) {
      throw ConfigError("hc.delta must be >= 0");
    }
  }
  if (c.mode == RunMode::kFedAvgDp) {
    const DpConfig& dp = c.dp;
    if (!dp.sigma2) {
      DpParameters p;
      p.epsilon = dp.epsilon;
      p.delta = dp.delta;
      p.clip = dp.clip;
      p.learning_rate = c.learning_rate;
      p.updates = dp.updates.value_or(static_cast<double>(c.epochs_per_round));
      // q depends on the partition size when unset; check the rest only.
      p.q = dp.q.value_or(1.0);
      try {
        DpSigmaSquared(p);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("dp: ") + e.what());
      }
    }
  }
  if (c.privacy.enabled) {
    if (c.privacy.level < 1 || c.privacy.level > kMaxHistogramLevel) {
      throw ConfigError("privacy.level out of range");
    }
    for (double a : c.privacy.alphas) {
      if (!(a > 0.0) || a == 1.0) {
        throw ConfigError("privacy alphas must be > 0 and != 1");
      }
    }
  }
}

RunConfig ApplyConfigJson(std::string_view json_text, RunConfig c) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  CheckKeys(j,
            {"name", "description", "dataset", "mode", "seed", "test_fraction",
             "learning_rate", "hidden_layers", "epochs", "federation", "hc",
             "dp", "privacy", "output_dir", "timing"},
            "config");
  Read(j, "name", c.name, "config");
  if (j.contains("dataset")) {
    const json& d = j["dataset"];
    CheckKeys(d, {"path", "label_column", "positive_label", "delimiter"},
              "dataset");
    Read(d, "path", c.dataset_path, "dataset");
    Read(d, "label_column", c.label_column, "dataset");
    ReadOptional(d, "positive_label", c.positive_label, "dataset");
    std::string delim(1, c.delimiter);
    Read(d, "delimiter", delim, "dataset");
    if (delim.size() != 1) throw ConfigError("dataset.delimiter must be one character");
    c.delimiter = delim[0];
  }
  if (j.contains("mode")) {
    std::string mode;
    Read(j, "mode", mode, "config");
    c.mode = ParseRunMode(mode);
  }
  Read(j, "seed", c.seed, "config");
  Read(j, "test_fraction", c.test_fraction, "config");
  Read(j, "learning_rate", c.learning_rate, "config");
  Read(j, "hidden_layers", c.hidden_layers, "config");
  Read(j, "epochs", c.epochs, "config");
  if (j.contains("federation")) {
    const json& f = j["federation"];
    CheckKeys(f,
              {"nodes", "rounds", "epochs_per_round", "fraction",
               "resample_each_round", "threads"},
              "federation");
    Read(f, "nodes", c.nodes, "federation");
    Read(f, "rounds", c.rounds, "federation");
    Read(f, "epochs_per_round", c.epochs_per_round, "federation");
    Read(f, "fraction", c.fraction, "federation");
    Read(f, "resample_each_round", c.resample_each_round, "federation");
    Read(f, "threads", c.threads, "federation");
  }
  if (j.contains("hc")) {
    const json& h = j["hc"];
    CheckKeys(h,
              {"level", "max_level", "target_mean_level", "selection_p",
               "range", "delta"},
              "hc");
    if (h.contains("level")) {
      std::string level;
      Read(h, "level", level, "hc");
      c.hc.fixed_level = ParseLevelPolicy(level);
    }
    Read(h, "max_level", c.hc.max_level, "hc");
    Read(h, "target_mean_level", c.hc.target_mean_level, "hc");
    ReadOptional(h, "selection_p", c.hc.selection_p, "hc");
    if (h.contains("range")) {
      if (h["range"].is_null()) {
        c.hc.range.reset();
      } else {
        std::vector<double> r;
        Read(h, "range", r, "hc");
        if (r.size() != 2) throw ConfigError("hc.range must be [min, max]");
        c.hc.range = std::make_pair(r[0], r[1]);
      }
    }
    ReadOptional(h, "delta", c.hc.delta, "hc");
  }
  if (j.contains("dp")) {
    const json& d = j["dp"];
    CheckKeys(d, {"epsilon", "delta", "clip", "updates", "q", "sigma2"}, "dp");
    Read(d, "epsilon", c.dp.epsilon, "dp");
    Read(d, "delta", c.dp.delta, "dp");
    Read(d, "clip", c.dp.clip, "dp");
    ReadOptional(d, "updates", c.dp.updates, "dp");
    ReadOptional(d, "q", c.dp.q, "dp");
    ReadOptional(d, "sigma2", c.dp.sigma2, "dp");
  }
  if (j.contains("privacy")) {
    const json& p = j["privacy"];
    CheckKeys(p, {"enabled", "level", "alphas"}, "privacy");
    Read(p, "enabled", c.privacy.enabled, "privacy");
    Read(p, "level", c.privacy.level, "privacy");
    Read(p, "alphas", c.privacy.alphas, "privacy");
  }
  Read(j, "output_dir", c.output_dir, "config");
  Read(j, "timing", c.timing, "config");
  return c;
}

RunConfig LoadConfigFile(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ApplyConfigJson(buffer.str(), std::move(base));
}

namespace {

json ConfigJson(const RunConfig& c) {
  json hc_range = c.hc.range ? json::array({c.hc.range->first, c.hc.range->second})
                             : json(nullptr);
  return {
      {"name", c.name},
      {"dataset",
       {{"path", c.dataset_path},
        {"label_column", c.label_column},
        {"positive_label", OptionalJson(c.positive_label)},
        {"delimiter", std::string(1, c.delimiter)}}},
      {"mode", std::string(RunModeName(c.mode))},
      {"seed", c.seed},
      {"test_fraction", c.test_fraction},
      {"learning_rate", c.learning_rate},
      {"hidden_layers", c.hidden_layers},
      {"epochs", c.epochs},
      {"federation",
       {{"nodes", c.nodes},
        {"rounds", c.rounds},
        {"epochs_per_round", c.epochs_per_round},
        {"fraction", c.fraction},
        {"resample_each_round", c.resample_each_round},
        {"threads", c.threads}}},
      {"hc",
       {{"level", LevelPolicyName(c.hc.fixed_level)},
        {"max_level", c.hc.max_level},
        {"target_mean_level", c.hc.target_mean_level},
        {"selection_p", OptionalJson(c.hc.selection_p)},
        {"range", hc_range},
        {"delta", OptionalJson(c.hc.delta)}}},
      {"dp",
       {{"epsilon", c.dp.epsilon},
        {"delta", c.dp.delta},
        {"clip", c.dp.clip},
        {"updates", OptionalJson(c.dp.updates)},
        {"q", OptionalJson(c.dp.q)},
        {"sigma2", OptionalJson(c.dp.sigma2)}}},
      {"privacy",
       {{"enabled", c.privacy.enabled},
        {"level", c.privacy.level},
        {"alphas", c.privacy.alphas}}},
      {"output_dir", c.output_dir},
      {"timing", c.timing},
  };
}

}  // namespace

std::string ConfigToJson(const RunConfig& config) {
  return ConfigJson(config).dump(2);
}

FederationConfig ToFederationConfig(const RunConfig& c) {
  FederationConfig f;
  f.nodes = c.nodes;
  f.rounds = c.rounds;
  f.epochs_per_round = c.epochs_per_round;
  f.learning_rate = c.learning_rate;
  f.fraction = c.fraction;
  f.resample_each_round = c.resample_each_round;
  switch (c.mode) {
    case RunMode::kFedAvgHc:
      f.mode = AggregationMode::kHashComb;
      break;
    case RunMode::kFedAvgDp:
      f.mode = AggregationMode::kGaussianDp;
      break;
    default:
      f.mode = AggregationMode::kNoHc;
  }
  f.hc_fixed_level = c.hc.fixed_level;
  f.dp = c.dp;
  f.hidden_layers = c.hidden_layers;
  f.seed = c.seed;
  f.threads = c.threads;
  return f;
}

void WriteMetricsCsv(const std::vector<MetricsRow>& rows, std::ostream& out) {
  out << "round,mode,accuracy,f1,wall_ms\n";
  for (const MetricsRow& r : rows) {
    out << r.round << ',' << RunModeName(r.mode) << ',' << std::fixed
        << std::setprecision(6) << r.accuracy << ',' << r.f1 << ','
        << std::setprecision(3) << r.wall_ms << '\n';
  }
  out << std::defaultfloat;
}

RunOutcome RunExperiment(const RunConfig& config, const Dataset* dataset,
                         std::ostream* log) {
  ValidateRunConfig(config);
  Dataset loaded;
  if (dataset == nullptr) {
    CsvOptions csv;
    csv.label_column = config.label_column;
    csv.positive_label = config.positive_label;
    csv.delimiter = config.delimiter;
    loaded = IngestCsv(config.dataset_path, csv);
    dataset = &loaded;
  }
  auto split_rng = DeriveRng(config.seed, RngStream::kSplit);
  auto [train, test] = TrainTestSplit(*dataset, config.test_fraction, split_rng);
  if (train.CountPositive() == 0 || train.CountPositive() == train.rows()) {
    throw DatasetError("training split contains a single class");
  }
  if (log) {
    *log << "dataset: " << dataset->rows() << " rows, " << dataset->cols()
         << " features; train " << train.rows() << ", test " << test.rows()
         << "\n";
  }

  RunOutcome outcome;
  json manifest;
  manifest["tool_version"] = kToolVersion;
  manifest["config"] = ConfigJson(config);
  manifest["seeds"] = {{"run", config.seed},
                       {"streams",
                        {{"model_init", static_cast<int>(RngStream::kModelInit)},
                         {"split", static_cast<int>(RngStream::kSplit)},
                         {"partition", static_cast<int>(RngStream::kPartition)},
                         {"node_training",
                          static_cast<int>(RngStream::kNodeTraining)},
                         {"level_sampling",
                          static_cast<int>(RngStream::kLevelSampling)},
                         {"dp_noise", static_cast<int>(RngStream::kDpNoise)},
                         {"negotiation",
                          static_cast<int>(RngStream::kNegotiation)}}}};
  manifest["dataset"] = {{"path", config.dataset_path},
                         {"sha256", FileSha256(config.dataset_path)},
                         {"rows", dataset->rows()},
                         {"features", dataset->cols()},
                         {"positives", dataset->CountPositive()},
                         {"normalization", "minmax"},
                         {"column_min", dataset->column_min()},
                         {"column_max", dataset->column_max()},
                         {"feature_names", dataset->feature_names()}};
  manifest["split"] = {{"test_fraction", config.test_fraction},
                       {"train_rows", train.rows()},
                       {"test_rows", test.rows()}};
  manifest["digest_algorithm"] = kDigestAlgorithm;

  std::vector<double> final_params;
  std::optional<QuantizationScheme> scheme;

  if (config.mode == RunMode::kMonolithic) {
    const auto start = std::chrono::steady_clock::now();
    auto init_rng = DeriveRng(config.seed, RngStream::kModelInit);
    Mlp model = Mlp::Create(
        LayerSizes(static_cast<int>(train.cols()), config.hidden_layers),
        init_rng);
    // Same stream as node 0 of a federated run.
    auto train_rng = DeriveRng(config.seed, RngStream::kNodeTraining, {0});
    SgdOptions sgd;
    sgd.epochs = config.epochs;
    sgd.learning_rate = config.learning_rate;
    TrainSgd(model, train, sgd, train_rng);
    const ClassificationMetrics m = Evaluate(model, test);
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    outcome.rows.push_back(
        {1, config.mode, m.accuracy, m.f1, config.timing ? ms : 0.0});
    final_params = model.Parameters();
  } else {
    FederationConfig fed = ToFederationConfig(config);
    if (config.mode == RunMode::kFedAvgHc) {
      const Mlp init = InitialGlobalModel(fed, static_cast<int>(train.cols()));
      const auto range = config.hc.range.value_or(
          ParameterRange(init.Parameters()));
      std::vector<LocalRange> ranges(config.nodes,
                                     LocalRange{range.first, range.second});
      NegotiationOptions opt;
      opt.threshold = (config.nodes - 1) / 2;
      opt.max_level = config.hc.max_level;
      opt.target_mean_level = config.hc.target_mean_level;
      opt.selection_p = config.hc.selection_p;
      opt.delta = config.hc.delta;
      auto neg_rng = DeriveRng(config.seed, RngStream::kNegotiation);
      NegotiationResult negotiated = RunNegotiation(ranges, opt, neg_rng);
      scheme = negotiated.schemes.front();
      const auto pub = SerializePublicScheme(*scheme);
      manifest["scheme"] = {
          {"fingerprint_sha256", ToHex(Sha256(pub))},
          {"c_min", scheme->c_min()},
          {"c_max", scheme->c_max()},
          {"delta", scheme->delta()},
          {"max_level", scheme->max_level()},
          {"selection_p", scheme->selection_p()},
          {"level_policy", LevelPolicyName(config.hc.fixed_level)},
          {"coordinator", negotiated.coordinator},
          {"transcript_messages", negotiated.transcript.size()}};
      if (log) {
        *log << "negotiated range [" << scheme->c_min() << ", "
             << scheme->c_max() << "], L=" << scheme->max_level()
             << ", p=" << scheme->selection_p() << ", coordinator "
             << negotiated.coordinator << "\n";
      }
    }
    auto on_round = [&](const RoundMetrics& r) {
      if (log) {
        *log << "round " << r.round << ": accuracy " << r.metrics.accuracy
             << ", f1 " << r.metrics.f1 << "\n";
      }
    };
    const FederationResult fr = RunFederation(
        fed, train, test, scheme ? &*scheme : nullptr, on_round);
    for (const RoundMetrics& r : fr.rounds) {
      outcome.rows.push_back({r.round, config.mode, r.metrics.accuracy,
                              r.metrics.f1, config.timing ? r.wall_ms : 0.0});
    }
    if (config.mode == RunMode::kFedAvgDp) {
      manifest["dp"] = {{"sigma2", fr.dp_sigma2}};
    }
    final_params = fr.final_parameters;
  }

  const auto best = std::max_element(
      outcome.rows.begin(), outcome.rows.end(),
      [](const MetricsRow& a, const MetricsRow& b) { return a.f1 < b.f1; });
  outcome.best_f1 = best->f1;
  outcome.best_round = best->round;
  outcome.final_accuracy = outcome.rows.back().accuracy;
  outcome.final_f1 = outcome.rows.back().f1;
  manifest["result"] = {{"best_f1", outcome.best_f1},
                        {"best_round", outcome.best_round},
                        {"final_accuracy", outcome.final_accuracy},
                        {"final_f1", outcome.final_f1}};

  if (config.privacy.enabled) {
    // Histogram of the final parameters; the salt plays no role in it.
    const auto range = scheme ? std::make_pair(scheme->c_min(), scheme->c_max())
                              : ParameterRange(final_params);
    std::vector<double> sample = final_params;
    for (double& w : sample) w = std::clamp(w, range.first, range.second);
    const int max_level = std::max(config.privacy.level, kDefaultMaxLevel);
    const QuantizationScheme hist = QuantizationScheme::FromSourceRange(
        range.first, range.second, 0.0, max_level, 1.0, Salt{});
    const auto report = AdjacentDivergence(sample, 0, range.second, hist,
                                           config.privacy.level,
                                           config.privacy.alphas);
    outcome.privacy_json = ReportToJson(report);
  }
  outcome.manifest_json = manifest.dump(2);
  outcome.scheme = scheme;
  return outcome;
}

int RunAndWrite(const RunConfig& config, std::ostream& err, std::ostream* log) {
  RunOutcome outcome;
  try {
    outcome = RunExperiment(config, nullptr, log);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const DatasetError& e) {
    err << "dataset error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const TrainingDivergence& e) {
    err << "training diverged: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kExitConfigError;
  }
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) {
    err << "cannot create " << config.output_dir << ": " << ec.message() << "\n";
    return kExitConfigError;
  }
  const std::filesystem::path dir(config.output_dir);
  {
    std::ofstream csv(dir / "metrics.csv", std::ios::binary);
    WriteMetricsCsv(outcome.rows, csv);
  }
  {
    std::ofstream manifest(dir / "manifest.json", std::ios::binary);
    manifest << outcome.manifest_json << "\n";
  }
  if (!outcome.privacy_json.empty()) {
    std::ofstream privacy(dir / "privacy.json", std::ios::binary);
    privacy << outcome.privacy_json << "\n";
  }
  if (log) {
    *log << "best f1 " << outcome.best_f1 << " (round " << outcome.best_round
         << "), final f1 " << outcome.final_f1 << "; wrote "
         << (dir / "metrics.csv").string() << "\n";
  }
  return kExitOk;
}

}  // namespace hashcomb
