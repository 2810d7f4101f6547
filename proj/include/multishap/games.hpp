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

#ifndef MULTISHAP_GAMES_HPP
#define MULTISHAP_GAMES_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "multishap/feature_space.hpp"

namespace multishap {

// A cross-modal feature pair in global indices: patch < m <= token < m + n.
struct CrossPair {
  std::size_t patch = 0;
  std::size_t token = 0;

  friend bool operator==(const CrossPair&, const CrossPair&) = default;
};

// Unordered feature pair stored with first < second.
struct FeaturePair {
  std::size_t first = 0;
  std::size_t second = 0;

  static FeaturePair of(std::size_t a, std::size_t b);
  friend auto operator<=>(const FeaturePair&, const FeaturePair&) = default;
};

struct AdditiveParams {
  std::vector<double> coefficients;  // one per feature
};

struct PurePairParams {
  CrossPair pair;
  double amplitude = 1.0;
};

// v(S) = constant + sum_{k in S} linear[k] + sum_{{k,l} subset S} pairwise[{k,l}]
struct MultilinearParams {
  double constant = 0.0;
  std::vector<double> linear;
  std::map<FeaturePair, double> pairwise;
};

enum class GameKind { kAdditive, kPurePair, kMultilinear };

// Closed-form cooperative game with known interaction structure.
class SyntheticGame {
 public:
  using Params = std::variant<AdditiveParams, PurePairParams, MultilinearParams>;

  static SyntheticGame additive(const FeatureSpace& space, std::vector<double> coefficients);
  static SyntheticGame pure_pair(const FeatureSpace& space, CrossPair pair, double amplitude);
  static SyntheticGame multilinear(const FeatureSpace& space, MultilinearParams params);

  const FeatureSpace& space() const { return space_; }
  GameKind kind() const;
  const Params& params() const { return params_; }
  const std::optional<std::uint64_t>& seed() const { return seed_; }

  friend SyntheticGame random_multilinear(const FeatureSpace&, std::uint64_t, double);
  friend SyntheticGame game_from_json(const nlohmann::json&);

 private:
  SyntheticGame(FeatureSpace space, Params params)
      : space_(std::move(space)), params_(std::move(params)) {}

  FeatureSpace space_;
  Params params_;
  std::optional<std::uint64_t> seed_;
};

double evaluate(const SyntheticGame& game, const Coalition& s);

// The pair's interaction index under the 1/2-normalized kernel used
// throughout this library (classical value = 2x).
double closed_form_sii(const SyntheticGame& game, CrossPair pair);

// Unweighted mean of the second-order difference over all subsets.
double closed_form_banzhaf(const SyntheticGame& game, CrossPair pair);

// Reproducible random multilinear game. Each unordered pair (cross-modal or
// within one modality) receives a coefficient with probability `density`;
// linear, pairwise and constant terms are drawn on [-1, 1].
SyntheticGame random_multilinear(const FeatureSpace& space, std::uint64_t seed,
                                 double density);

// Fixture format: {"variant", "params", "seed", "space"}.
nlohmann::json game_to_json(const SyntheticGame& game);
SyntheticGame game_from_json(const nlohmann::json& j);

// Short command-line form: "additive", "purepair" or "multilinear:<seed>".
// Additive uses coefficients 1..M, purepair puts amplitude 1 on (patch 0,
// first token).
SyntheticGame game_from_spec(std::string_view spec, const FeatureSpace& space,
                             double density = 0.5);

}  // namespace multishap

#endif  // MULTISHAP_GAMES_HPP
