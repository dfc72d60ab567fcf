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

#ifndef HASHCOMB_MLP_H_
#define HASHCOMB_MLP_H_

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace hashcomb {

class Dataset;

// Loss or parameters became non-finite; the run cannot continue.
class TrainingDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Hidden layout 50-25-20-25-50.
std::vector<int> DefaultHiddenLayers();
// [input_dim, hidden..., 1]
std::vector<int> LayerSizes(int input_dim, std::span<const int> hidden);

struct DenseLayer {
  int inputs = 0;
  int outputs = 0;
  std::vector<double> weights;  // outputs x inputs, row-major
  std::vector<double> bias;     // outputs
};

// Binary classifier: ReLU hidden layers, one sigmoid output unit.
class Mlp {
 public:
  // Weights uniform in [-r, r], r = sqrt(6 / (fan_in + fan_out)); zero bias.
  static Mlp Create(std::span<const int> layer_sizes, std::mt19937_64& rng);
  static Mlp Zeros(std::span<const int> layer_sizes);

  int input_dim() const { return layers_.front().inputs; }
  std::vector<int> layer_sizes() const;
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  // Pre-sigmoid output. Throws std::invalid_argument on a size mismatch.
  double Logit(std::span<const double> x) const;
  // Probability of the positive class, in (0, 1).
  double Forward(std::span<const double> x) const;

  // Flat order: layer by layer, row-major weights then biases.
  std::size_t ParameterCount() const;
  std::vector<double> Parameters() const;
  void SetParameters(std::span<const double> flat);
  bool AllFinite() const;

 private:
  explicit Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {}

  std::vector<DenseLayer> layers_;
};

// Gradient tensors shaped like the model's layers.
struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> bias;

  static Gradients ZerosLike(const Mlp& model);
  std::vector<double> Flatten() const;
  void Scale(double factor);
};

// Binary cross-entropy of one example.
double Loss(const Mlp& model, std::span<const double> x, int label);

// Adds d(loss)/d(params) of one example into *grads; returns the loss.
double AccumulateGradients(const Mlp& model, std::span<const double> x,
                           int label, Gradients& grads);

// Rescales every weight matrix and bias vector separately so that its L2
// norm is at most max_norm.
void ClipGradients(Gradients& grads, double max_norm);

struct Example {
  std::span<const double> features;
  int label;
};

// One SGD update on the mean gradient of `batch`. Returns the mean loss
// before the update. Throws std::invalid_argument when eta <= 0 and
// TrainingDivergence on a non-finite loss or parameter.
double SgdStep(Mlp& model, std::span<const Example> batch, double eta,
               std::optional<double> clip = std::nullopt);

struct SgdOptions {
  long epochs = 0;  // one epoch = one update on one random example
  double learning_rate = 0.05;
  std::optional<double> clip;
};

// Runs options.epochs single-example updates, each on a row drawn uniformly
// from `rows`. Throws std::invalid_argument when `rows` is empty.
void TrainSgd(Mlp& model, const Dataset& data, std::span<const std::size_t> rows,
              const SgdOptions& options, std::mt19937_64& rng);
// Same, over every row of `data`.
void TrainSgd(Mlp& model, const Dataset& data, const SgdOptions& options,
              std::mt19937_64& rng);

// Mean loss over the dataset.
double MeanLoss(const Mlp& model, const Dataset& data);

}  // namespace hashcomb

#endif  // HASHCOMB_MLP_H_
