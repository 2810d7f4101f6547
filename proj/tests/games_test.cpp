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

#include <gtest/gtest.h>

#include "multishap/error.hpp"

namespace multishap {
namespace {

Coalition make(const FeatureSpace& space, std::vector<std::size_t> idx) {
  return coalition_from_indices(space, idx);
}

double delta(const SyntheticGame& g, const Coalition& s, std::size_t i, std::size_t j) {
  return evaluate(g, s.with(i, j)) - evaluate(g, s.with(i)) - evaluate(g, s.with(j)) +
         evaluate(g, s);
}

TEST(Games, EvaluateExamples) {
  const FeatureSpace space = make_space(2, 2);
  EXPECT_EQ(evaluate(SyntheticGame::additive(space, {1, 2, 3, 4}), make(space, {0, 2})), 4.0);
  EXPECT_EQ(evaluate(SyntheticGame::pure_pair(space, {0, 2}, 1.0), make(space, {0, 1, 2, 3})),
            1.0);
  EXPECT_EQ(evaluate(SyntheticGame::pure_pair(space, {0, 2}, 1.0), make(space, {0, 1, 3})), 0.0);

  MultilinearParams p;
  p.linear = {0.5, 0, 0, 0};
  p.pairwise[FeaturePair::of(2, 0)] = 2.0;
  EXPECT_EQ(evaluate(SyntheticGame::multilinear(space, p), make(space, {0, 2})), 2.5);
}

TEST(Games, RejectsInvalidParameters) {
  const FeatureSpace space = make_space(2, 2);
  EXPECT_THROW(SyntheticGame::pure_pair(space, {2, 3}, 1.0), InvalidArgument);
  EXPECT_THROW(SyntheticGame::pure_pair(space, {0, 1}, 1.0), InvalidArgument);
  EXPECT_THROW(SyntheticGame::additive(space, {1, 2}), InvalidArgument);
  MultilinearParams p;
  p.linear = {0, 0, 0, 0};
  p.pairwise[FeaturePair{1, 1}] = 1.0;
  EXPECT_THROW(SyntheticGame::multilinear(space, p), InvalidArgument);
  EXPECT_THROW(evaluate(SyntheticGame::additive(space, {1, 2, 3, 4}), Coalition(5)),
               InvalidArgument);
}

TEST(Games, ClosedForms) {
  const FeatureSpace space = make_space(2, 2);
  const auto additive = SyntheticGame::additive(space, {1, 2, 3, 4});
  EXPECT_EQ(closed_form_sii(additive, {1, 3}), 0.0);
  EXPECT_EQ(closed_form_banzhaf(additive, {1, 3}), 0.0);

  const auto pp = SyntheticGame::pure_pair(space, {0, 2}, 1.0);
  EXPECT_EQ(closed_form_sii(pp, {0, 2}), 0.5);
  EXPECT_EQ(closed_form_banzhaf(pp, {0, 2}), 1.0);
  EXPECT_EQ(closed_form_sii(pp, {1, 2}), 0.0);

  const FeatureSpace six = make_space(3, 3);
  MultilinearParams p;
  p.linear.assign(6, 0.3);
  p.pairwise[FeaturePair::of(0, 3)] = 2.0;
  p.pairwise[FeaturePair::of(1, 4)] = -0.5;
  p.pairwise[FeaturePair::of(0, 1)] = 9.0;  // within-modality
  const auto ml = SyntheticGame::multilinear(six, p);
  EXPECT_EQ(closed_form_sii(ml, {0, 3}), 1.0);
  EXPECT_EQ(closed_form_banzhaf(ml, {1, 4}), -0.5);
  EXPECT_EQ(closed_form_sii(ml, {2, 5}), 0.0);
  EXPECT_THROW(closed_form_sii(ml, {3, 0}), InvalidArgument);
}

TEST(Games, LinearityAndMultilinearConstancy) {
  const FeatureSpace space = make_space(4, 4);
  const auto additive = SyntheticGame::additive(space, {1, -2, 3, 0.25, 5, 6, -7, 8});
  const auto ml = random_multilinear(space, 11, 0.6);
  const auto& params = std::get<MultilinearParams>(ml.params());
  for (std::uint64_t mask = 0; mask < 256; ++mask) {
    const Coalition s = Coalition::from_mask(8, mask);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 4; j < 8; ++j) {
        if (s.contains(i) || s.contains(j)) continue;
        EXPECT_EQ(delta(additive, s, i, j), 0.0);
        const auto it = params.pairwise.find(FeaturePair::of(i, j));
        const double b = it == params.pairwise.end() ? 0.0 : it->second;
        EXPECT_NEAR(delta(ml, s, i, j), b, 1e-12);
      }
    }
  }
}

TEST(Games, RandomMultilinearIsReproducible) {
  const FeatureSpace space = make_space(4, 4);
  const auto a = random_multilinear(space, 7, 0.5);
  const auto b = random_multilinear(space, 7, 0.5);
  const auto c = random_multilinear(space, 8, 0.5);
  const auto& pa = std::get<MultilinearParams>(a.params());
  const auto& pb = std::get<MultilinearParams>(b.params());
  const auto& pc = std::get<MultilinearParams>(c.params());
  EXPECT_EQ(pa.pairwise, pb.pairwise);
  EXPECT_EQ(pa.linear, pb.linear);
  EXPECT_NE(pa.pairwise, pc.pairwise);
  for (double v : pa.linear) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
  for (const auto& [pair, v] : pa.pairwise) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Games, FullDensityCoversEveryCrossPair) {
  const FeatureSpace space = make_space(3, 4);
  const auto g = random_multilinear(space, 1, 1.0);
  const auto& p = std::get<MultilinearParams>(g.params());
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 3; j < 7; ++j) EXPECT_TRUE(p.pairwise.contains(FeaturePair::of(i, j)));
  }
  EXPECT_THROW(random_multilinear(space, 1, 0.0), InvalidArgument);
  EXPECT_THROW(random_multilinear(space, 1, 1.5), InvalidArgument);
}

TEST(Games, FixtureRoundTrip) {
  const FeatureSpace space = make_space(2, 3);
  for (const auto& g : {SyntheticGame::additive(space, {1, 2, 3, 4, 5}),
                        SyntheticGame::pure_pair(space, {1, 4}, -2.5),
                        random_multilinear(space, 5, 0.5)}) {
    const auto back = game_from_json(game_to_json(g));
    EXPECT_EQ(back.kind(), g.kind());
    EXPECT_EQ(game_to_json(back), game_to_json(g));
    for (std::uint64_t mask = 0; mask < 32; ++mask) {
      const Coalition s = Coalition::from_mask(5, mask);
      EXPECT_EQ(evaluate(back, s), evaluate(g, s));
    }
  }
}

TEST(Games, SeededFixtureWithoutCoefficients) {
  nlohmann::json j = {{"variant", "multilinear"},
                      {"seed", 7},
                      {"space", space_to_json(make_space(3, 3))}};
  const auto g = game_from_json(j);
  EXPECT_EQ(game_to_json(g)["params"], game_to_json(random_multilinear(make_space(3, 3), 7, 0.5))["params"]);
}

TEST(Games, ShortSpecs) {
  const FeatureSpace space = make_space(2, 2);
  EXPECT_EQ(game_from_spec("additive", space).kind(), GameKind::kAdditive);
  const auto pp = game_from_spec("purepair", space);
  EXPECT_EQ(closed_form_sii(pp, {0, 2}), 0.5);
  EXPECT_EQ(game_to_json(game_from_spec("multilinear:7", space)),
            game_to_json(game_from_spec("multilinear:seed=7", space)));
  EXPECT_THROW(game_from_spec("cubic", space), InvalidArgument);
  EXPECT_THROW(game_from_spec("multilinear:x", space), InvalidArgument);
}

}  // namespace
}  // namespace multishap
