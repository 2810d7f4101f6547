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

#include "multishap/kernels.hpp"

#include <bit>

namespace multishap::kernels {

namespace {

// Both the serial and OpenMP drivers call these per-cell bodies.

void pair_cell(std::span<const double> table, std::size_t m, std::size_t n,
               std::span<const double> kernel, std::size_t cell, double& weighted,
               double& plain) {
  const std::size_t features = m + n;
  const std::uint64_t full = features == 64 ? ~std::uint64_t{0}
                                            : (std::uint64_t{1} << features) - 1;
  const std::uint64_t bi = std::uint64_t{1} << (cell / n);
  const std::uint64_t bj = std::uint64_t{1} << (m + cell % n);
  const std::uint64_t rest = full & ~(bi | bj);
  double w_sum = 0.0;
  double p_sum = 0.0;
  std::uint64_t s = 0;
  do {
    const double delta = table[s | bi | bj] - table[s | bi] - table[s | bj] + table[s];
    w_sum += kernel[static_cast<std::size_t>(std::popcount(s))] * delta;
    p_sum += delta;
    s = (s - rest) & rest;
  } while (s != 0);
  weighted = w_sum;
  plain = p_sum;
}

double marginal_cell(std::span<const double> table, std::size_t features,
                     std::span<const double> kernel, std::size_t k) {
  const std::uint64_t full = features == 64 ? ~std::uint64_t{0}
                                            : (std::uint64_t{1} << features) - 1;
  const std::uint64_t bk = std::uint64_t{1} << k;
  const std::uint64_t rest = full & ~bk;
  double sum = 0.0;
  std::uint64_t s = 0;
  do {
    sum += kernel[static_cast<std::size_t>(std::popcount(s))] * (table[s | bk] - table[s]);
    s = (s - rest) & rest;
  } while (s != 0);
  return sum;
}

void accumulate_cell(std::span<const SampleSlots> samples, std::span<const double> values,
                     std::size_t m, std::size_t n, std::size_t cell, CellStats& stats) {
  const std::size_t i = cell / n;
  const std::size_t j = m + cell % n;
  CellStats acc;
  for (const SampleSlots& sample : samples) {
    const std::uint32_t both = sample.pair[cell];
    if (both == kNoSlot) continue;
    const double delta = values[both] - values[sample.single[i]] -
                         values[sample.single[j]] + values[sample.base];
    acc.add(delta, sample.weight);
  }
  stats = acc;
}

}  // namespace

void pair_sums(std::span<const double> table, std::size_t m, std::size_t n,
               std::span<const double> kernel, std::span<double> weighted,
               std::span<double> plain) {
  const auto cells = static_cast<std::int64_t>(m * n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < cells; ++c) {
    pair_cell(table, m, n, kernel, static_cast<std::size_t>(c), weighted[c], plain[c]);
  }
}

void marginal_sums(std::span<const double> table, std::size_t features,
                   std::span<const double> kernel, std::span<double> out) {
  const auto count = static_cast<std::int64_t>(features);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t k = 0; k < count; ++k) {
    out[k] = marginal_cell(table, features, kernel, static_cast<std::size_t>(k));
  }
}

void accumulate_cells(std::span<const SampleSlots> samples,
                      std::span<const double> values, std::size_t m, std::size_t n,
                      std::span<CellStats> cells) {
  const auto count = static_cast<std::int64_t>(m * n);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < count; ++c) {
    accumulate_cell(samples, values, m, n, static_cast<std::size_t>(c), cells[c]);
  }
}

namespace serial {

void pair_sums(std::span<const double> table, std::size_t m, std::size_t n,
               std::span<const double> kernel, std::span<double> weighted,
               std::span<double> plain) {
  for (std::size_t c = 0; c < m * n; ++c) {
    pair_cell(table, m, n, kernel, c, weighted[c], plain[c]);
  }
}

void marginal_sums(std::span<const double> table, std::size_t features,
                   std::span<const double> kernel, std::span<double> out) {
  for (std::size_t k = 0; k < features; ++k) {
    out[k] = marginal_cell(table, features, kernel, k);
  }
}

void accumulate_cells(std::span<const SampleSlots> samples,
                      std::span<const double> values, std::size_t m, std::size_t n,
                      std::span<CellStats> cells) {
  for (std::size_t c = 0; c < m * n; ++c) {
    accumulate_cell(samples, values, m, n, c, cells[c]);
  }
}

}  // namespace serial

}  // namespace multishap::kernels
