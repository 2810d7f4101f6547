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

#include "multishap/exact.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "multishap/error.hpp"
#include "multishap/games.hpp"
#include "multishap/kernels.hpp"
#include "multishap/scorer.hpp"

namespace multishap {
namespace {

// Independent reference: explicit subset loop with factorials in long double.
long double factorial(std::size_t k) {
  long double f = 1.0L;
  for (std::size_t t = 2; t <= k; ++t) f *= static_cast<long double>(t);
  return f;
}

double reference_sii(const SyntheticGame& g, std::size_t i, std::size_t j) {
  const std::size_t big_m = g.space().total();
  long double acc = 0.0L;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << big_m); ++mask) {
    if ((mask >> i & 1) || (mask >> j & 1)) continue;
    const Coalition s = Coalition::from_mask(big_m, mask);
    const std::size_t k = s.size();
    const long double w = factorial(k) * factorial(big_m - k - 2) / (2.0L * factorial(big_m - 1));
    acc += w * (evaluate(g, s.with(i, j)) - evaluate(g, s.with(i)) - evaluate(g, s.with(j)) +
                evaluate(g, s));
  }
  return static_cast<double>(acc);
}

TEST(SiiWeight, Examples) {
  EXPECT_DOUBLE_EQ(sii_weight(0, 2), 0.5);
  EXPECT_DOUBLE_EQ(sii_weight(0, 3), 0.25);
  EXPECT_THROW(sii_weight(3, 4), InvalidArgument);
  EXPECT_THROW(sii_weight(0, 1), InvalidArgument);
}

TEST(SiiWeight, KernelSumsToHalf) {
  for (std::size_t big_m = 2; big_m <= 20; ++big_m) {
    const SiiWeightTable table(big_m);
    double sum = 0.0;
    for (std::size_t s = 0; s + 2 <= big_m; ++s) {
      EXPECT_GT(table[s], 0.0);
      sum += std::exp(std::lgamma(big_m - 1.0) - std::lgamma(s + 1.0) -
                      std::lgamma(big_m - 1.0 - s)) *
             table[s];
    }
    EXPECT_NEAR(sum, 0.5, 1e-12) << "M=" << big_m;
  }
}

TEST(ExactSii, Examples) {
  const FeatureSpace four = make_space(2, 2);
  auto pp = make_game_scorer(SyntheticGame::pure_pair(four, {0, 2}, 1.0));
  EXPECT_NEAR(exact_sii(*pp, four, {0, 2}), 0.5, 1e-12);
  EXPECT_NEAR(exact_banzhaf(*pp, four, {0, 2}), 1.0, 1e-12);
  EXPECT_NEAR(exact_shapley_value(*pp, four, 0), 0.5, 1e-12);
  EXPECT_NEAR(exact_shapley_value(*pp, four, 1), 0.0, 1e-12);

  auto add = make_game_scorer(SyntheticGame::additive(four, {1, 2, 3, 4}));
  EXPECT_NEAR(exact_sii(*add, four, {1, 3}), 0.0, 1e-12);
  EXPECT_NEAR(exact_banzhaf(*add, four, {1, 3}), 0.0, 1e-12);
  EXPECT_NEAR(exact_shapley_value(*add, four, 2), 3.0, 1e-12);

  const FeatureSpace six = make_space(2, 4);
  MultilinearParams p;
  p.linear.assign(6, 0.0);
  p.pairwise[FeaturePair::of(0, 2)] = -3.0;
  auto ml = make_game_scorer(SyntheticGame::multilinear(six, p));
  EXPECT_NEAR(exact_sii(*ml, six, {0, 2}), -1.5, 1e-12);

  p.pairwise[FeaturePair::of(0, 2)] = 0.7;
  auto ml2 = make_game_scorer(SyntheticGame::multilinear(six, p));
  EXPECT_NEAR(exact_banzhaf(*ml2, six, {0, 2}), 0.7, 1e-12);
}

TEST(ExactSii, NormalizationClassicalDoubles) {
  const FeatureSpace four = make_space(2, 2);
  auto pp = make_game_scorer(SyntheticGame::pure_pair(four, {0, 2}, 1.0));
  ExactOptions o;
  o.normalization = Normalization::kClassical;
  EXPECT_NEAR(exact_sii(*pp, four, {0, 2}, o), 1.0, 1e-12);
  EXPECT_EQ(normalization_from_name("classical"), Normalization::kClassical);
  EXPECT_THROW(normalization_from_name("other"), InvalidArgument);
}

TEST(ExactSii, MatchesReferenceAndClosedForm) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const FeatureSpace space = make_space(2 + seed % 3, 3 + seed % 2);
    const SyntheticGame g = random_multilinear(space, seed, 0.7);
    const ExactResult r = exact_all(g);
    for (std::size_t i = 0; i < space.patches(); ++i) {
      for (std::size_t j = 0; j < space.tokens(); ++j) {
        const CrossPair pair{i, space.token_index(j)};
        EXPECT_NEAR(r.sii(i, j), reference_sii(g, pair.patch, pair.token), 1e-12);
        EXPECT_NEAR(r.sii(i, j), closed_form_sii(g, pair), 1e-12);
        EXPECT_NEAR(r.banzhaf(i, j), closed_form_banzhaf(g, pair), 1e-12);
      }
    }
  }
}

// Non-multilinear score function so the kernel weights actually matter.
std::unique_ptr<FunctionScorer> nonlinear_scorer(const FeatureSpace& space, double scale = 1.0) {
  ScorerMeta meta;
  meta.m = space.patches();
  meta.n = space.tokens();
  meta.task = Task::kSynthetic;
  meta.deterministic = true;
  return std::make_unique<FunctionScorer>(meta, [scale](const Coalition& s) {
    double v = 0.0;
    for (std::size_t k : s.indices()) v += std::sin(1.0 + static_cast<double>(k));
    const double k = static_cast<double>(s.size());
    return scale * (v * v + std::sqrt(k) - (s.contains(0) && s.contains(3) ? k * 0.1 : 0.0));
  });
}

TEST(ExactAll, EfficiencyOfShapleyValues) {
  for (std::size_t big_m = 2; big_m <= 12; ++big_m) {
    const FeatureSpace space = make_space(big_m / 2, big_m - big_m / 2);
    auto scorer = nonlinear_scorer(space);
    const ExactResult r = exact_all(*scorer, space);
    double sum = 0.0;
    for (double phi : r.shapley) sum += phi;
    const Coalition none(big_m);
    const Coalition all = full_coalition(big_m);
    const auto ends = scorer->score({}, std::vector<Coalition>{none, all});
    EXPECT_NEAR(sum, ends[1] - ends[0], 1e-9) << "M=" << big_m;
  }
}

TEST(ExactAll, NonlinearGameMatchesDirectEnumeration) {
  const FeatureSpace space = make_space(3, 3);
  auto scorer = nonlinear_scorer(space);
  const ExactResult r = exact_all(*scorer, space);
  const std::size_t big_m = 6;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 3; j < 6; ++j) {
      long double sii = 0.0L;
      long double banzhaf = 0.0L;
      for (std::uint64_t mask = 0; mask < 64; ++mask) {
        if ((mask >> i & 1) || (mask >> j & 1)) continue;
        const Coalition s = Coalition::from_mask(big_m, mask);
        const auto v = scorer->score({}, std::vector<Coalition>{s.with(i, j), s.with(i), s.with(j), s});
        const long double d = v[0] - v[1] - v[2] + v[3];
        const std::size_t k = s.size();
        sii += factorial(k) * factorial(big_m - k - 2) / (2.0L * factorial(big_m - 1)) * d;
        banzhaf += d / 16.0L;
      }
      EXPECT_NEAR(r.sii(i, j - 3), static_cast<double>(sii), 1e-12);
      EXPECT_NEAR(r.banzhaf(i, j - 3), static_cast<double>(banzhaf), 1e-12);
    }
  }
}

TEST(ExactAll, SymmetryScalingAndMemoization) {
  const FeatureSpace space = make_space(3, 3);
  auto scorer = nonlinear_scorer(space);
  auto scaled = nonlinear_scorer(space, 4.0);
  const ExactResult r = exact_all(*scorer, space);
  const ExactResult r4 = exact_all(*scaled, space);
  for (std::size_t c = 0; c < 9; ++c) {
    EXPECT_EQ(r4.sii.flat()[c], 4.0 * r.sii.flat()[c]);
    EXPECT_EQ(r4.banzhaf.flat()[c], 4.0 * r.banzhaf.flat()[c]);
  }
  for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(r4.shapley[k], 4.0 * r.shapley[k]);

  ExactOptions direct;
  direct.memoize = false;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const CrossPair pair{i, 3 + j};
      EXPECT_EQ(exact_sii(*scorer, space, pair, direct), exact_sii(*scorer, space, pair));
      EXPECT_EQ(exact_banzhaf(*scorer, space, pair, direct), exact_banzhaf(*scorer, space, pair));
      EXPECT_EQ(exact_sii(*scorer, space, pair), r.sii(i, j));
    }
  }
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_EQ(exact_shapley_value(*scorer, space, k, direct), r.shapley[k]);
  }

  // Swapping the roles of the two modalities keeps the index symmetric.
  const FeatureSpace swapped = make_space(3, 3);
  ScorerMeta meta = scorer->meta();
  FunctionScorer mirror(meta, [&](const Coalition& s) {
    Coalition t(6);
    for (std::size_t k : s.indices()) t.insert((k + 3) % 6);
    return scorer->score({}, std::vector<Coalition>{t})[0];
  });
  const ExactResult rm = exact_all(mirror, swapped);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(rm.sii(j, i), r.sii(i, j), 1e-14);
  }
}

TEST(ExactAll, SerialAndParallelAgreeBitwise) {
  const FeatureSpace space = make_space(5, 5);
  auto scorer = nonlinear_scorer(space);
  ExactOptions serial;
  serial.parallel = false;
  const ExactResult a = exact_all(*scorer, space);
  const ExactResult b = exact_all(*scorer, space, serial);
  EXPECT_EQ(a.sii, b.sii);
  EXPECT_EQ(a.banzhaf, b.banzhaf);
  EXPECT_EQ(a.shapley, b.shapley);
  EXPECT_EQ(a.evaluations, std::size_t{1} << 10);
}

TEST(ExactAll, RefusesLargeUniverse) {
  const FeatureSpace space = make_space(11, 10);
  EXPECT_THROW(exact_all(random_multilinear(space, 0, 0.5)), InvalidArgument);
}

TEST(ExactAll, NonFiniteScoreIsScorerError) {
  const FeatureSpace space = make_space(2, 2);
  ScorerMeta meta{kProtocolVersion, 2, 2, Task::kOther, true, {}, {}, {}};
  FunctionScorer bad(meta, [](const Coalition& s) {
    return s.size() == 3 ? std::nan("") : 1.0;
  });
  EXPECT_THROW(exact_all(bad, space), ScorerError);
}

TEST(Kernels, SerialTwinsMatch) {
  const std::size_t m = 4;
  const std::size_t n = 4;
  const std::size_t big_m = m + n;
  std::vector<double> table(std::size_t{1} << big_m);
  for (std::size_t s = 0; s < table.size(); ++s) table[s] = std::cos(0.37 * s) * (s % 7);
  const SiiWeightTable weights(big_m);
  std::vector<double> w1(m * n), p1(m * n), w2(m * n), p2(m * n);
  kernels::pair_sums(table, m, n, weights.weights(), w1, p1);
  kernels::serial::pair_sums(table, m, n, weights.weights(), w2, p2);
  EXPECT_EQ(w1, w2);
  EXPECT_EQ(p1, p2);
  const auto sw = shapley_weights(big_m);
  std::vector<double> s1(big_m), s2(big_m);
  kernels::marginal_sums(table, big_m, sw, s1);
  kernels::serial::marginal_sums(table, big_m, sw, s2);
  EXPECT_EQ(s1, s2);
}

}  // namespace
}  // namespace multishap
