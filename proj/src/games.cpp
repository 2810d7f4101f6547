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

#include "multishap/games.hpp"

#include <charconv>
#include <string>

#include "multishap/error.hpp"
#include "multishap/random.hpp"

namespace multishap {

namespace {

void check_cross_pair(const FeatureSpace& space, CrossPair pair) {
  if (!space.is_patch(pair.patch) || !space.is_token(pair.token)) {
    throw InvalidArgument("(" + std::to_string(pair.patch) + ", " +
                          std::to_string(pair.token) +
                          ") is not a (patch, token) pair");
  }
}

void check_universe(const FeatureSpace& space, const Coalition& s) {
  if (s.universe() != space.total()) {
    throw InvalidArgument("coalition over " + std::to_string(s.universe()) +
                          " features used with a game over " +
                          std::to_string(space.total()));
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Second-order coefficient on the pair, or 0 when the game has none.
double pair_coefficient(const SyntheticGame& game, CrossPair pair) {
  return std::visit(
      Overloaded{
          [](const AdditiveParams&) { return 0.0; },
          [&](const PurePairParams& p) {
            return p.pair == pair ? p.amplitude : 0.0;
          },
          [&](const MultilinearParams& p) {
            auto it = p.pairwise.find(FeaturePair::of(pair.patch, pair.token));
            return it == p.pairwise.end() ? 0.0 : it->second;
          },
      },
      game.params());
}

}  // namespace

FeaturePair FeaturePair::of(std::size_t a, std::size_t b) {
  if (a == b) throw InvalidArgument("pair needs two distinct features");
  return a < b ? FeaturePair{a, b} : FeaturePair{b, a};
}

SyntheticGame SyntheticGame::additive(const FeatureSpace& space,
                                      std::vector<double> coefficients) {
  if (coefficients.size() != space.total()) {
    throw InvalidArgument("additive game needs one coefficient per feature");
  }
  return SyntheticGame(space, AdditiveParams{std::move(coefficients)});
}

SyntheticGame SyntheticGame::pure_pair(const FeatureSpace& space, CrossPair pair,
                                       double amplitude) {
  check_cross_pair(space, pair);
  return SyntheticGame(space, PurePairParams{pair, amplitude});
}

SyntheticGame SyntheticGame::multilinear(const FeatureSpace& space,
                                         MultilinearParams params) {
  if (params.linear.empty()) params.linear.assign(space.total(), 0.0);
  if (params.linear.size() != space.total()) {
    throw InvalidArgument("multilinear game needs one linear coefficient per feature");
  }
  for (const auto& [key, value] : params.pairwise) {
    if (key.first >= key.second || key.second >= space.total()) {
      throw InvalidArgument("pairwise coefficient references invalid features");
    }
  }
  return SyntheticGame(space, std::move(params));
}

GameKind SyntheticGame::kind() const {
  return static_cast<GameKind>(params_.index());
}

double evaluate(const SyntheticGame& game, const Coalition& s) {
  check_universe(game.space(), s);
  return std::visit(
      Overloaded{
          [&](const AdditiveParams& p) {
            double v = 0.0;
            for (std::size_t k : s.indices()) v += p.coefficients[k];
            return v;
          },
          [&](const PurePairParams& p) {
            return s.contains(p.pair.patch) && s.contains(p.pair.token) ? p.amplitude
                                                                        : 0.0;
          },
          [&](const MultilinearParams& p) {
            double v = p.constant;
            for (std::size_t k : s.indices()) v += p.linear[k];
            for (const auto& [key, b] : p.pairwise) {
              if (s.contains(key.first) && s.contains(key.second)) v += b;
            }
            return v;
          },
      },
      game.params());
}

double closed_form_sii(const SyntheticGame& game, CrossPair pair) {
  check_cross_pair(game.space(), pair);
  return 0.5 * pair_coefficient(game, pair);
}

double closed_form_banzhaf(const SyntheticGame& game, CrossPair pair) {
  check_cross_pair(game.space(), pair);
  return pair_coefficient(game, pair);
}

SyntheticGame random_multilinear(const FeatureSpace& space, std::uint64_t seed,
                                 double density) {
  if (!(density > 0.0 && density <= 1.0)) {
    throw InvalidArgument("density must lie in (0, 1]");
  }
  Rng rng(seed);
  MultilinearParams p;
  p.constant = uniform_real(rng, -1.0, 1.0);
  p.linear.resize(space.total());
  for (double& a : p.linear) a = uniform_real(rng, -1.0, 1.0);
  for (std::size_t k = 0; k < space.total(); ++k) {
    for (std::size_t l = k + 1; l < space.total(); ++l) {
      // Draw both numbers unconditionally so the stream layout does not
      // depend on density.
      const double keep = uniform_unit(rng);
      const double b = uniform_real(rng, -1.0, 1.0);
      if (density >= 1.0 || keep < density) p.pairwise[FeaturePair{k, l}] = b;
    }
  }
  SyntheticGame game = SyntheticGame::multilinear(space, std::move(p));
  game.seed_ = seed;
  return game;
}

nlohmann::json game_to_json(const SyntheticGame& game) {
  nlohmann::json j;
  j["space"] = space_to_json(game.space());
  j["seed"] = game.seed() ? nlohmann::json(*game.seed()) : nlohmann::json(nullptr);
  std::visit(Overloaded{
                 [&](const AdditiveParams& p) {
                   j["variant"] = "additive";
                   j["params"] = {{"coefficients", p.coefficients}};
                 },
                 [&](const PurePairParams& p) {
                   j["variant"] = "purepair";
                   j["params"] = {{"patch", p.pair.patch},
                                  {"token", p.pair.token},
                                  {"amplitude", p.amplitude}};
                 },
                 [&](const MultilinearParams& p) {
                   j["variant"] = "multilinear";
                   nlohmann::json pairs = nlohmann::json::array();
                   for (const auto& [key, b] : p.pairwise) {
                     pairs.push_back({key.first, key.second, b});
                   }
                   j["params"] = {{"constant", p.constant},
                                  {"linear", p.linear},
                                  {"pairwise", pairs}};
                 },
             },
             game.params());
  return j;
}

SyntheticGame game_from_json(const nlohmann::json& j) {
  try {
    const FeatureSpace space = space_from_json(j.at("space"));
    const auto variant = j.at("variant").get<std::string>();
    const nlohmann::json params = j.contains("params") ? j.at("params") : nlohmann::json::object();
    std::optional<std::uint64_t> seed;
    if (j.contains("seed") && !j.at("seed").is_null()) {
      seed = j.at("seed").get<std::uint64_t>();
    }
    if (variant == "additive") {
      return SyntheticGame::additive(
          space, params.at("coefficients").get<std::vector<double>>());
    }
    if (variant == "purepair") {
      return SyntheticGame::pure_pair(
          space,
          CrossPair{params.at("patch").get<std::size_t>(),
                    params.at("token").get<std::size_t>()},
          params.at("amplitude").get<double>());
    }
    if (variant == "multilinear") {
      // A seeded fixture without explicit coefficients regenerates them.
      if (!params.contains("linear") && seed) {
        return random_multilinear(space, *seed, params.value("density", 0.5));
      }
      MultilinearParams p;
      p.constant = params.value("constant", 0.0);
      p.linear = params.at("linear").get<std::vector<double>>();
      for (const auto& row : params.at("pairwise")) {
        p.pairwise[FeaturePair::of(row.at(0).get<std::size_t>(),
                                   row.at(1).get<std::size_t>())] =
            row.at(2).get<double>();
      }
      SyntheticGame game = SyntheticGame::multilinear(space, std::move(p));
      game.seed_ = seed;
      return game;
    }
    throw FormatError("unknown game variant '" + variant + "'");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed game fixture: ") + e.what());
  }
}

SyntheticGame game_from_spec(std::string_view spec, const FeatureSpace& space,
                             double density) {
  if (spec == "additive") {
    std::vector<double> c(space.total());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = static_cast<double>(k + 1);
    return SyntheticGame::additive(space, std::move(c));
  }
  if (spec == "purepair") {
    return SyntheticGame::pure_pair(space, CrossPair{0, space.token_index(0)}, 1.0);
  }
  constexpr std::string_view kMultilinear = "multilinear:";
  if (spec.starts_with(kMultilinear)) {
    auto digits = spec.substr(kMultilinear.size());
    if (digits.starts_with("seed=")) digits.remove_prefix(5);
    std::uint64_t seed = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
      throw InvalidArgument("bad multilinear seed in '" + std::string(spec) + "'");
    }
    return random_multilinear(space, seed, density);
  }
  throw InvalidArgument("unknown game '" + std::string(spec) +
                        "' (expected additive, purepair or multilinear:<seed>)");
}

}  // namespace multishap
