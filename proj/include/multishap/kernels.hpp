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

#ifndef MULTISHAP_KERNELS_HPP
#define MULTISHAP_KERNELS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "multishap/cell_stats.hpp"

// Data-parallel inner loops. Every kernel has an OpenMP version in
// multishap::kernels and a plain-loop twin in multishap::kernels::serial;
// parallelism is only ever across independent output cells, and each cell
// reduces in a fixed order, so the two produce bitwise-identical results.
namespace multishap::kernels {

inline constexpr std::uint32_t kNoSlot = UINT32_MAX;

// Slots into a shared value array for one sampled coalition S.
struct SampleSlots {
  std::uint32_t base = kNoSlot;       // v(S)
  std::uint32_t size = 0;             // |S|
  double weight = 1.0;                // importance weight of S
  std::vector<std::uint32_t> single;  // v(S + k) per feature, kNoSlot if k in S
  std::vector<std::uint32_t> pair;    // v(S + i + j) per cell (row-major m x n)
};

// For every cross pair (patch i, token m + j), row-major over (i, j):
//   weighted[c] = sum_S kernel[|S|] * delta_ij(S)
//   plain[c]    = sum_S delta_ij(S)
// over all S avoiding i and j, where `table` holds v over all 2^M bitmasks.
void pair_sums(std::span<const double> table, std::size_t m, std::size_t n,
               std::span<const double> kernel, std::span<double> weighted,
               std::span<double> plain);

// out[k] = sum_{S not containing k} kernel[|S|] * (v(S + k) - v(S)).
void marginal_sums(std::span<const double> table, std::size_t features,
                   std::span<const double> kernel, std::span<double> out);

// Feeds every (sample, cell) second-order difference into its cell, samples
// in order. `cells` is row-major m x n.
void accumulate_cells(std::span<const SampleSlots> samples,
                      std::span<const double> values, std::size_t m, std::size_t n,
                      std::span<CellStats> cells);

namespace serial {

void pair_sums(std::span<const double> table, std::size_t m, std::size_t n,
               std::span<const double> kernel, std::span<double> weighted,
               std::span<double> plain);
void marginal_sums(std::span<const double> table, std::size_t features,
                   std::span<const double> kernel, std::span<double> out);
void accumulate_cells(std::span<const SampleSlots> samples,
                      std::span<const double> values, std::size_t m, std::size_t n,
                      std::span<CellStats> cells);

}  // namespace serial

}  // namespace multishap::kernels

#endif  // MULTISHAP_KERNELS_HPP
