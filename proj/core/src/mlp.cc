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

#include "hashcomb/mlp.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "hashcomb/dataset.h"

namespace hashcomb {
namespace {

void CheckSizes(std::span<const int> layer_sizes) {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("an MLP needs at least input and output sizes");
  }
  for (int s : layer_sizes) {
    if (s < 1) throw std::invalid_argument("layer sizes must be positive");
  }
  if (layer_sizes.back() != 1) {
    throw std::invalid_argument("the output layer must have one unit");
  }
}

// Softplus(z) - y z, i.e. binary cross-entropy on a logit.
double BceFromLogit(double z, int label) {
  return std::max(z, 0.0) - (label != 0 ? z : 0.0) +
         std::log1p(std::exp(-std::fabs(z)));
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// activations[0] = x; activations[l] = output of layer l (post-ReLU for
// hidden layers, raw logit for the last one).
void ForwardPass(const std::vector<DenseLayer>& layers,
                 std::span<const double> x,
                 std::vector<std::vector<double>>& activations) {
  activations.resize(layers.size() + 1);
  activations[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const DenseLayer& layer = layers[l];
    const std::vector<double>& in = activations[l];
    std::vector<double>& out = activations[l + 1];
    out.resize(layer.outputs);
    const bool hidden = l + 1 < layers.size();
    for (int o = 0; o < layer.outputs; ++o) {
      const double* w = layer.weights.data() +
                        static_cast<std::size_t>(o) * layer.inputs;
      double z = layer.bias[o];
      for (int i = 0; i < layer.inputs; ++i) z += w[i] * in[i];
      out[o] = hidden ? std::max(z, 0.0) : z;
    }
  }
}

}  // namespace

std::vector<int> DefaultHiddenLayers() { return {50, 25, 20, 25, 50}; }

std::vector<int> LayerSizes(int input_dim, std::span<const int> hidden) {
  std::vector<int> sizes{input_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return sizes;
}

Mlp Mlp::Zeros(std::span<const int> layer_sizes) {
  CheckSizes(layer_sizes);
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    DenseLayer layer;
    layer.inputs = layer_sizes[l];
    layer.outputs = layer_sizes[l + 1];
    layer.weights.assign(
        static_cast<std::size_t>(layer.inputs) * layer.outputs, 0.0);
    layer.bias.assign(layer.outputs, 0.0);
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

Mlp Mlp::Create(std::span<const int> layer_sizes, std::mt19937_64& rng) {
  Mlp model = Zeros(layer_sizes);
  for (DenseLayer& layer : model.layers_) {
    const double r = std::sqrt(6.0 / (layer.inputs + layer.outputs));
    std::uniform_real_distribution<double> uniform(-r, r);
    for (double& w : layer.weights) w = uniform(rng);
  }
  return model;
}

std::vector<int> Mlp::layer_sizes() const {
  std::vector<int> sizes{layers_.front().inputs};
  for (const DenseLayer& layer : layers_) sizes.push_back(layer.outputs);
  return sizes;
}

double Mlp::Logit(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(input_dim())) {
    throw std::invalid_argument("input has " + std::to_string(x.size()) +
                                " features, model expects " +
                                std::to_string(input_dim()));
  }
  thread_local std::vector<std::vector<double>> activations;
  ForwardPass(layers_, x, activations);
  return activations.back()[0];
}

double Mlp::Forward(std::span<const double> x) const { return Sigmoid(Logit(x)); }

std::size_t Mlp::ParameterCount() const {
  std::size_t n = 0;
  for (const DenseLayer& layer : layers_) {
    n += layer.weights.size() + layer.bias.size();
  }
  return n;
}

std::vector<double> Mlp::Parameters() const {
  std::vector<double> flat;
  flat.reserve(ParameterCount());
  for (const DenseLayer& layer : layers_) {
    flat.insert(flat.end(), layer.weights.begin(), layer.weights.end());
    flat.insert(flat.end(), layer.bias.begin(), layer.bias.end());
  }
  return flat;
}

void Mlp::SetParameters(std::span<const double> flat) {
  if (flat.size() != ParameterCount()) {
    throw std::invalid_argument("parameter vector has " +
                                std::to_string(flat.size()) +
                                " entries, model has " +
                                std::to_string(ParameterCount()));
  }
  auto it = flat.begin();
  for (DenseLayer& layer : layers_) {
    std::copy_n(it, layer.weights.size(), layer.weights.begin());
    it += static_cast<std::ptrdiff_t>(layer.weights.size());
    std::copy_n(it, layer.bias.size(), layer.bias.begin());
    it += static_cast<std::ptrdiff_t>(layer.bias.size());
  }
}

bool Mlp::AllFinite() const {
  for (const DenseLayer& layer : layers_) {
    for (double w : layer.weights) {
      if (!std::isfinite(w)) return false;
    }
    for (double b : layer.bias) {
      if (!std::isfinite(b)) return false;
    }
  }
  return true;
}

Gradients Gradients::ZerosLike(const Mlp& model) {
  Gradients g;
  for (const DenseLayer& layer : model.layers()) {
    g.weights.emplace_back(layer.weights.size(), 0.0);
    g.bias.emplace_back(layer.bias.size(), 0.0);
  }
  return g;
}

std::vector<double> Gradients::Flatten() const {
  std::vector<double> flat;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.insert(flat.end(), weights[l].begin(), weights[l].end());
    flat.insert(flat.end(), bias[l].begin(), bias[l].end());
  }
  return flat;
}

void Gradients::Scale(double factor) {
  for (auto& w : weights) {
    for (double& v : w) v *= factor;
  }
  for (auto& b : bias) {
    for (double& v : b) v *= factor;
  }
}

double Loss(const Mlp& model, std::span<const double> x, int label) {
  return BceFromLogit(model.Logit(x), label);
}

double AccumulateGradients(const Mlp& model, std::span<const double> x,
                           int label, Gradients& grads) {
  const auto& layers = model.layers();
  if (x.size() != static_cast<std::size_t>(model.input_dim())) {
    throw std::invalid_argument("input size does not match the model");
  }
  thread_local std::vector<std::vector<double>> activations;
  thread_local std::vector<double> delta;
  thread_local std::vector<double> prev_delta;
  ForwardPass(layers, x, activations);
  const double logit = activations.back()[0];
  const double loss = BceFromLogit(logit, label);

  delta.assign(1, Sigmoid(logit) - (label != 0 ? 1.0 : 0.0));
  for (std::size_t l = layers.size(); l-- > 0;) {
    const DenseLayer& layer = layers[l];
    const std::vector<double>& in = activations[l];
    std::vector<double>& gw = grads.weights[l];
    std::vector<double>& gb = grads.bias[l];
    for (int o = 0; o < layer.outputs; ++o) {
      const double d = delta[o];
      gb[o] += d;
      if (d == 0.0) continue;
      double* row = gw.data() + static_cast<std::size_t>(o) * layer.inputs;
      for (int i = 0; i < layer.inputs; ++i) row[i] += d * in[i];
    }
    if (l == 0) break;
    prev_delta.assign(layer.inputs, 0.0);
    for (int o = 0; o < layer.outputs; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* w =
          layer.weights.data() + static_cast<std::size_t>(o) * layer.inputs;
      for (int i = 0; i < layer.inputs; ++i) prev_delta[i] += w[i] * d;
    }
    // ReLU derivative on the previous layer's pre-activation: the stored
    // activation is positive exactly where the unit was active.
    for (int i = 0; i < layer.inputs; ++i) {
      if (in[i] <= 0.0) prev_delta[i] = 0.0;
    }
    delta.swap(prev_delta);
  }
  return loss;
}

void ClipGradients(Gradients& grads, double max_norm) {
  if (!(max_norm > 0.0)) {
    throw std::invalid_argument("clip norm must be positive");
  }
  auto clip = [max_norm](std::vector<double>& v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
      const double scale = max_norm / norm;
      for (double& x : v) x *= scale;
    }
  };
  for (auto& w : grads.weights) clip(w);
  for (auto& b : grads.bias) clip(b);
}

double SgdStep(Mlp& model, std::span<const Example> batch, double eta,
               std::optional<double> clip) {
  if (!(eta > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (batch.empty()) throw std::invalid_argument("empty batch");
  thread_local Gradients grads;
  if (grads.weights.size() != model.layers().size()) {
    grads = Gradients::ZerosLike(model);
  } else {
    for (std::size_t l = 0; l < grads.weights.size(); ++l) {
      grads.weights[l].assign(model.layers()[l].weights.size(), 0.0);
      grads.bias[l].assign(model.layers()[l].bias.size(), 0.0);
    }
  }
  double loss = 0.0;
  for (const Example& ex : batch) {
    loss += AccumulateGradients(model, ex.features, ex.label, grads);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  loss *= inv;
  if (!std::isfinite(loss)) {
    throw TrainingDivergence("non-finite training loss");
  }
  if (batch.size() > 1) grads.Scale(inv);
  if (clip) ClipGradients(grads, *clip);

  auto& layers = model.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    DenseLayer& layer = layers[l];
    for (std::size_t k = 0; k < layer.weights.size(); ++k) {
      layer.weights[k] -= eta * grads.weights[l][k];
    }
    for (std::size_t k = 0; k < layer.bias.size(); ++k) {
      layer.bias[k] -= eta * grads.bias[l][k];
    }
  }
  return loss;
}

void TrainSgd(Mlp& model, const Dataset& data, std::span<const std::size_t> rows,
              const SgdOptions& options, std::mt19937_64& rng) {
  if (rows.empty()) throw std::invalid_argument("no training rows");
  std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
  for (long epoch = 0; epoch < options.epochs; ++epoch) {
    const std::size_t r = rows[pick(rng)];
    const Example ex{data.Row(r), data.Label(r)};
    SgdStep(model, std::span(&ex, 1), options.learning_rate, options.clip);
  }
  if (!model.AllFinite()) {
    throw TrainingDivergence("non-finite model parameters after training");
  }
}

void TrainSgd(Mlp& model, const Dataset& data, const SgdOptions& options,
              std::mt19937_64& rng) {
  std::vector<std::size_t> rows(data.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  TrainSgd(model, data, rows, options, rng);
}

double MeanLoss(const Mlp& model, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("empty dataset");
  double sum = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    sum += Loss(model, data.Row(i), data.Label(i));
  }
  return sum / static_cast<double>(data.rows());
}

}  // namespace hashcomb
