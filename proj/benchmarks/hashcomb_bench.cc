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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "hashcomb/codec.h"
#include "hashcomb/dataset.h"
#include "hashcomb/federation.h"
#include "hashcomb/mlp.h"
#include "hashcomb/quantization.h"

namespace hashcomb {
namespace {

QuantizationScheme BenchScheme() {
  return QuantizationScheme::FromSourceRange(-0.73, 0.73, 0.73, 16,
                                             SolveBias(8.0, 16), Salt{7});
}

void BM_Encode(benchmark::State& state) {
  const QuantizationScheme s = BenchScheme();
  const int level = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(Encode(u(rng), level, s));
}
BENCHMARK(BM_Encode)->Arg(4)->Arg(8)->Arg(16);

void BM_BuildTable(benchmark::State& state) {
  const QuantizationScheme s = BenchScheme();
  const int level = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(DigestTable::Build(level, s));
  state.SetItemsProcessed(state.iterations() *
                          QuantizationScheme::ChannelCount(level));
}
BENCHMARK(BM_BuildTable)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_SgdStep(benchmark::State& state) {
  const Dataset data = MakeSyntheticDataset(256, 57, 0.05, 3);
  std::mt19937_64 rng(2);
  Mlp model = Mlp::Create(LayerSizes(57, DefaultHiddenLayers()), rng);
  std::size_t row = 0;
  for (auto _ : state) {
    const Example ex[] = {{data.Row(row), data.Label(row)}};
    benchmark::DoNotOptimize(SgdStep(model, ex, 0.05));
    row = (row + 1) % data.rows();
  }
}
BENCHMARK(BM_SgdStep);

void BM_FedAvgHashed(benchmark::State& state) {
  const QuantizationScheme s = BenchScheme();
  const DigestTableSet tables = DigestTableSet::AllLevels(s);
  const std::size_t params =
      Mlp::Zeros(LayerSizes(57, DefaultHiddenLayers())).ParameterCount();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(s.c_min(), s.c_max());
  std::vector<std::vector<HashComb>> msgs(4);
  for (auto& m : msgs) {
    for (std::size_t k = 0; k < params; ++k) {
      m.push_back(tables.Encode(u(rng), ClampLevel(SampleLevel(rng, s))));
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(FedAvgHashed(msgs, tables));
  state.SetItemsProcessed(state.iterations() * 4 * params);
}
BENCHMARK(BM_FedAvgHashed)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace hashcomb

BENCHMARK_MAIN();
