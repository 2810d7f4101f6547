/*
 * Copyright 2026 The multishap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Serial reference loops versus the OpenMP kernels.

#include <benchmark/benchmark.h>

#include <cmath>

#include "multishap/cell_stats.hpp"
#include "multishap/exact.hpp"
#include "multishap/kernels.hpp"
#include "multishap/random.hpp"
#include "multishap/sampling.hpp"

namespace {

using namespace multishap;

std::vector<double> value_table(std::size_t features) {
  std::vector<double> t(std::size_t{1} << features);
  for (std::size_t s = 0; s < t.size(); ++s) t[s] = std::sin(0.001 * static_cast<double>(s));
  return t;
}

template <bool Parallel>
void BM_PairSums(benchmark::State& state) {
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  const std::size_t n = m;
  const auto table = value_table(m + n);
  const SiiWeightTable kernel(m + n);
  std::vector<double> weighted(m * n);
  std::vector<double> plain(m * n);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::pair_sums(table, m, n, kernel.weights(), weighted, plain);
    } else {
      kernels::serial::pair_sums(table, m, n, kernel.weights(), weighted, plain);
    }
    benchmark::DoNotOptimize(weighted.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m * n) *
                          static_cast<std::int64_t>(table.size() / 4));
}

template <bool Parallel>
void BM_MarginalSums(benchmark::State& state) {
  const std::size_t features = static_cast<std::size_t>(state.range(0));
  const auto table = value_table(features);
  const auto kernel = shapley_weights(features);
  std::vector<double> out(features);
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::marginal_sums(table, features, kernel, out);
    } else {
      kernels::serial::marginal_sums(table, features, kernel, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

// Slot layout of K stratified draws, as the estimator builds it.
struct Draws {
  std::vector<kernels::SampleSlots> samples;
  std::vector<double> values;
};

Draws make_draws(std::size_t m, std::size_t n, std::size_t k) {
  Draws d;
  Rng rng(1);
  const std::size_t total = m + n;
  for (std::size_t t = 0; t < k; ++t) {
    const Coalition s = sample_coalition(rng, SamplingMode::kStratified, total);
    kernels::SampleSlots slots;
    slots.size = static_cast<std::uint32_t>(s.size());
    slots.weight = stratified_weight(s.size(), total);
    slots.base = static_cast<std::uint32_t>(d.values.size());
    d.values.push_back(uniform_unit(rng));
    slots.single.assign(total, kernels::kNoSlot);
    slots.pair.assign(m * n, kernels::kNoSlot);
    for (std::size_t f = 0; f < total; ++f) {
      if (s.contains(f)) continue;
      slots.single[f] = static_cast<std::uint32_t>(d.values.size());
      d.values.push_back(uniform_unit(rng));
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (s.contains(i) || s.contains(m + j)) continue;
        slots.pair[i * n + j] = static_cast<std::uint32_t>(d.values.size());
        d.values.push_back(uniform_unit(rng));
      }
    }
    d.samples.push_back(std::move(slots));
  }
  return d;
}

template <bool Parallel>
void BM_AccumulateCells(benchmark::State& state) {
  const std::size_t k = static_cast<std::size_t>(state.range(0));
  const Draws d = make_draws(49, 12, k);
  for (auto _ : state) {
    std::vector<CellStats> cells(49 * 12);
    if constexpr (Parallel) {
      kernels::accumulate_cells(d.samples, d.values, 49, 12, cells);
    } else {
      kernels::serial::accumulate_cells(d.samples, d.values, 49, 12, cells);
    }
    benchmark::DoNotOptimize(cells.data());
  }
}

BENCHMARK(BM_PairSums<false>)->Name("pair_sums/serial")->Arg(4)->Arg(6)->Arg(8);
BENCHMARK(BM_PairSums<true>)->Name("pair_sums/openmp")->Arg(4)->Arg(6)->Arg(8);
BENCHMARK(BM_MarginalSums<false>)->Name("marginal_sums/serial")->Arg(12)->Arg(16)->Arg(20);
BENCHMARK(BM_MarginalSums<true>)->Name("marginal_sums/openmp")->Arg(12)->Arg(16)->Arg(20);
BENCHMARK(BM_AccumulateCells<false>)->Name("accumulate_cells/serial")->Arg(32)->Arg(128)->Arg(512);
BENCHMARK(BM_AccumulateCells<true>)->Name("accumulate_cells/openmp")->Arg(32)->Arg(128)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
