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

#ifndef MULTISHAP_EXACT_HPP
#define MULTISHAP_EXACT_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "multishap/feature_space.hpp"
#include "multishap/games.hpp"
#include "multishap/matrix.hpp"
#include "multishap/scorer.hpp"

namespace multishap {

// kPaper: pair kernel s!(M-s-2)! / (2 (M-1)!), summing to 1/2.
// kClassical: twice that, the conventional interaction index.
enum class Normalization { kPaper, kClassical };

std::string_view normalization_name(Normalization n);
Normalization normalization_from_name(std::string_view name);

// s!(M-s-2)! / (2 (M-1)!) for 0 <= s <= M-2, via log-gamma.
double sii_weight(std::size_t s, std::size_t features);

// sii_weight for every size class of a universe of M features.
class SiiWeightTable {
 public:
  explicit SiiWeightTable(std::size_t features);

  std::size_t features() const { return features_; }
  double operator[](std::size_t s) const { return weights_.at(s); }
  std::span<const double> weights() const { return weights_; }

 private:
  std::size_t features_;
  std::vector<double> weights_;
};

// s!(M-s-1)! / M! for 0 <= s <= M-1 (first-order Shapley kernel).
std::vector<double> shapley_weights(std::size_t features);

struct ExactOptions {
  // Enumeration refuses universes above this size.
  std::size_t max_features = 20;
  // Tabulate v over all 2^M coalitions once and reuse it; otherwise every
  // term is requested from the scorer as it is needed.
  bool memoize = true;
  // Use the OpenMP kernels; false runs the serial reference loops.
  bool parallel = true;
  Normalization normalization = Normalization::kPaper;
  std::string sample_id;
};

// v over every bitmask 0 .. 2^M - 1. Throws ScorerError on non-finite scores.
std::vector<double> tabulate_values(Scorer& scorer, const FeatureSpace& space,
                                    const ExactOptions& options = {});

double exact_sii(Scorer& scorer, const FeatureSpace& space, CrossPair pair,
                 const ExactOptions& options = {});
double exact_banzhaf(Scorer& scorer, const FeatureSpace& space, CrossPair pair,
                     const ExactOptions& options = {});
double exact_shapley_value(Scorer& scorer, const FeatureSpace& space, std::size_t feature,
                           const ExactOptions& options = {});

struct ExactResult {
  Matrix sii;       // m x n, normalization per options
  Matrix banzhaf;   // m x n
  std::vector<double> shapley;  // one per feature
  std::size_t evaluations = 0;  // scorer evaluations requested
};

// All cross pairs and first-order values from a single tabulation.
ExactResult exact_all(Scorer& scorer, const FeatureSpace& space,
                      const ExactOptions& options = {});

// Convenience overloads for in-process games.
ExactResult exact_all(const SyntheticGame& game, const ExactOptions& options = {});

}  // namespace multishap

#endif  // MULTISHAP_EXACT_HPP
