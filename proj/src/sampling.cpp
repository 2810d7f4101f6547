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

#include "multishap/sampling.hpp"

#include <numeric>
#include <string>
#include <vector>

#include "multishap/error.hpp"

namespace multishap {

std::string_view mode_name(SamplingMode mode) {
  return mode == SamplingMode::kUniform ? "uniform" : "stratified";
}

SamplingMode mode_from_name(std::string_view name) {
  if (name == "uniform") return SamplingMode::kUniform;
  if (name == "stratified") return SamplingMode::kStratified;
  throw InvalidArgument("mode must be 'uniform' or 'stratified', got '" + std::string(name) +
                        "'");
}

Coalition sample_coalition(Rng& rng, SamplingMode mode, std::size_t features) {
  Coalition s(features);
  if (mode == SamplingMode::kUniform) {
    for (std::size_t base = 0; base < features; base += 64) {
      std::uint64_t bits = rng();
      const std::size_t span = std::min<std::size_t>(64, features - base);
      for (std::size_t b = 0; b < span; ++b, bits >>= 1) {
        if (bits & 1U) s.insert(base + b);
      }
    }
    return s;
  }
  const std::size_t size = static_cast<std::size_t>(uniform_below(rng, features + 1));
  std::vector<std::size_t> order(features);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t t = 0; t < size; ++t) {
    const std::size_t r = t + static_cast<std::size_t>(uniform_below(rng, features - t));
    std::swap(order[t], order[r]);
    s.insert(order[t]);
  }
  return s;
}

double stratified_weight(std::size_t size, std::size_t features) {
  if (size + 2 > features) return 0.0;
  const double absent = static_cast<double>(features - size);
  return 1.0 / (absent * (absent - 1.0));
}

}  // namespace multishap
