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

#ifndef MULTISHAP_SAMPLING_HPP
#define MULTISHAP_SAMPLING_HPP

#include <string_view>

#include "multishap/feature_space.hpp"
#include "multishap/random.hpp"

namespace multishap {

enum class SamplingMode {
  // Every subset equally likely: one fair coin per feature.
  kUniform,
  // Size uniform on {0..M}, then a uniform subset of that size.
  kStratified,
};

std::string_view mode_name(SamplingMode mode);
SamplingMode mode_from_name(std::string_view name);

Coalition sample_coalition(Rng& rng, SamplingMode mode, std::size_t features);

// Importance weight of a size-s coalition under stratified sampling, relative
// to the size kernel of the pair interaction index: 1 / ((M-s)(M-s-1)).
// Zero when fewer than two features are absent.
double stratified_weight(std::size_t size, std::size_t features);

}  // namespace multishap

#endif  // MULTISHAP_SAMPLING_HPP
