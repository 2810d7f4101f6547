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

#include <array>
#include <cmath>

#include "multishap/error.hpp"
#include "multishap/kernels.hpp"

namespace multishap {

namespace {

constexpr std::size_t kHardLimit = 30;
constexpr std::size_t kTabulateChunk = 4096;

void check_enumerable(const FeatureSpace& space, const ExactOptions& options) {
  const std::size_t limit = std::min(options.max_features, kHardLimit);
  if (space.total() > limit) {
    throw InvalidArgument("exhaustive enumeration over M=" + std::to_string(space.total()) +
                          " features exceeds the limit of " + std::to_string(limit));
  }
}

void check_scorer(Scorer& scorer, const FeatureSpace& space) {
  const ScorerMeta meta = scorer.meta();
  if (meta.m != space.patches() || meta.n != space.tokens()) {
    throw InvalidArgument("scorer advertises m=" + std::to_string(meta.m) +
                          ", n=" + std::to_string(meta.n) + " but the feature space has m=" +
                          std::to_string(space.patches()) + ", n=" +
                          std::to_string(space.tokens()));
  }
}

double checked(double v, const Coalition& c) {
  if (!std::isfinite(v)) {
    throw ScorerError("non-finite score for coalition of size " + std::to_string(c.size()));
  }
  return v;
}

double normalization_factor(Normalization n) {
  return n == Normalization::kClassical ? 2.0 : 1.0;
}

// Term-by-term evaluation without a table, in the same subset order as the
// kernels so both paths agree bitwise.
struct DirectSums {
  double weighted = 0.0;
  double plain = 0.0;
};

DirectSums direct_pair_sums(Scorer& scorer, const FeatureSpace& space, CrossPair pair,
                            std::span<const double> kernel, const std::string& sample_id) {
  const std::size_t features = space.total();
  const std::uint64_t full = (std::uint64_t{1} << features) - 1;
  const std::uint64_t bi = std::uint64_t{1} << pair.patch;
  const std::uint64_t bj = std::uint64_t{1} << pair.token;
  const std::uint64_t rest = full & ~(bi | bj);
  DirectSums sums;
  std::uint64_t s = 0;
  do {
    const std::array<Coalition, 4> terms{
        Coalition::from_mask(features, s | bi | bj), Coalition::from_mask(features, s | bi),
        Coalition::from_mask(features, s | bj), Coalition::from_mask(features, s)};
    const std::vector<double> v = scorer.score(sample_id, terms);
    for (std::size_t t = 0; t < 4; ++t) checked(v[t], terms[t]);
    const double delta = v[0] - v[1] - v[2] + v[3];
    sums.weighted += kernel[static_cast<std::size_t>(std::popcount(s))] * delta;
    sums.plain += delta;
    s = (s - rest) & rest;
  } while (s != 0);
  return sums;
}

double direct_marginal_sum(Scorer& scorer, const FeatureSpace& space, std::size_t feature,
                           std::span<const double> kernel, const std::string& sample_id) {
  const std::size_t features = space.total();
  const std::uint64_t full = (std::uint64_t{1} << features) - 1;
  const std::uint64_t bk = std::uint64_t{1} << feature;
  const std::uint64_t rest = full & ~bk;
  double sum = 0.0;
  std::uint64_t s = 0;
  do {
    const std::array<Coalition, 2> terms{Coalition::from_mask(features, s | bk),
                                         Coalition::from_mask(features, s)};
    const std::vector<double> v = scorer.score(sample_id, terms);
    for (std::size_t t = 0; t < 2; ++t) checked(v[t], terms[t]);
    sum += kernel[static_cast<std::size_t>(std::popcount(s))] * (v[0] - v[1]);
    s = (s - rest) & rest;
  } while (s != 0);
  return sum;
}

std::size_t cell_of(const FeatureSpace& space, CrossPair pair) {
  if (!space.is_patch(pair.patch) || !space.is_token(pair.token)) {
    throw InvalidArgument("(" + std::to_string(pair.patch) + ", " + std::to_string(pair.token) +
                          ") is not a (patch, token) pair");
  }
  return pair.patch * space.tokens() + (pair.token - space.patches());
}

}  // namespace

std::string_view normalization_name(Normalization n) {
  return n == Normalization::kClassical ? "classical" : "paper";
}

Normalization normalization_from_name(std::string_view name) {
  if (name == "paper") return Normalization::kPaper;
  if (name == "classical") return Normalization::kClassical;
  throw InvalidArgument("normalization must be 'paper' or 'classical'");
}

double sii_weight(std::size_t s, std::size_t features) {
  if (features < 2) throw InvalidArgument("pair weights need at least two features");
  if (s > features - 2) {
    throw InvalidArgument("coalition size " + std::to_string(s) + " out of range [0, " +
                          std::to_string(features - 2) + "]");
  }
  const double sd = static_cast<double>(s);
  const double md = static_cast<double>(features);
  return std::exp(std::lgamma(sd + 1.0) + std::lgamma(md - sd - 1.0) - std::log(2.0) -
                  std::lgamma(md));
}

SiiWeightTable::SiiWeightTable(std::size_t features) : features_(features) {
  if (features < 2) throw InvalidArgument("pair weights need at least two features");
  weights_.resize(features - 1);
  for (std::size_t s = 0; s + 2 <= features; ++s) weights_[s] = sii_weight(s, features);
}

std::vector<double> shapley_weights(std::size_t features) {
  if (features < 1) throw InvalidArgument("Shapley weights need at least one feature");
  std::vector<double> w(features);
  const double md = static_cast<double>(features);
  for (std::size_t s = 0; s < features; ++s) {
    const double sd = static_cast<double>(s);
    w[s] = std::exp(std::lgamma(sd + 1.0) + std::lgamma(md - sd) - std::lgamma(md + 1.0));
  }
  return w;
}

std::vector<double> tabulate_values(Scorer& scorer, const FeatureSpace& space,
                                    const ExactOptions& options) {
  check_enumerable(space, options);
  check_scorer(scorer, space);
  const std::size_t features = space.total();
  const std::size_t count = std::size_t{1} << features;
  std::vector<double> table(count);
  const auto chunks = static_cast<std::int64_t>((count + kTabulateChunk - 1) / kTabulateChunk);

  auto run_chunk = [&](std::int64_t c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kTabulateChunk;
    const std::size_t end = std::min(count, begin + kTabulateChunk);
    std::vector<Coalition> batch;
    batch.reserve(end - begin);
    for (std::size_t mask = begin; mask < end; ++mask) {
      batch.push_back(Coalition::from_mask(features, mask));
    }
    const std::vector<double> v = scorer.score(options.sample_id, batch);
    for (std::size_t k = 0; k < batch.size(); ++k) table[begin + k] = checked(v[k], batch[k]);
  };

  if (options.parallel && scorer.concurrent_safe()) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < chunks; ++c) {
      try {
        run_chunk(c);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::int64_t c = 0; c < chunks; ++c) run_chunk(c);
  }
  return table;
}

double exact_sii(Scorer& scorer, const FeatureSpace& space, CrossPair pair,
                 const ExactOptions& options) {
  check_enumerable(space, options);
  const std::size_t cell = cell_of(space, pair);
  const SiiWeightTable kernel(space.total());
  const double factor = normalization_factor(options.normalization);
  if (options.memoize) {
    return exact_all(scorer, space, options).sii.flat()[cell];
  }
  check_scorer(scorer, space);
  return factor * direct_pair_sums(scorer, space, pair, kernel.weights(), options.sample_id)
                      .weighted;
}

double exact_banzhaf(Scorer& scorer, const FeatureSpace& space, CrossPair pair,
                     const ExactOptions& options) {
  check_enumerable(space, options);
  const std::size_t cell = cell_of(space, pair);
  if (options.memoize) {
    return exact_all(scorer, space, options).banzhaf.flat()[cell];
  }
  check_scorer(scorer, space);
  const SiiWeightTable kernel(space.total());
  const double subsets = std::ldexp(1.0, static_cast<int>(space.total() - 2));
  return direct_pair_sums(scorer, space, pair, kernel.weights(), options.sample_id).plain /
         subsets;
}

double exact_shapley_value(Scorer& scorer, const FeatureSpace& space, std::size_t feature,
                           const ExactOptions& options) {
  check_enumerable(space, options);
  if (feature >= space.total()) {
    throw InvalidArgument("feature " + std::to_string(feature) + " out of range");
  }
  if (options.memoize) return exact_all(scorer, space, options).shapley[feature];
  check_scorer(scorer, space);
  const std::vector<double> kernel = shapley_weights(space.total());
  return direct_marginal_sum(scorer, space, feature, kernel, options.sample_id);
}

ExactResult exact_all(Scorer& scorer, const FeatureSpace& space, const ExactOptions& options) {
  check_enumerable(space, options);
  const std::size_t m = space.patches();
  const std::size_t n = space.tokens();
  const std::size_t features = space.total();

  ExactResult result;
  result.sii = Matrix(m, n);
  result.banzhaf = Matrix(m, n);
  result.shapley.assign(features, 0.0);

  const SiiWeightTable pair_kernel(features);
  const std::vector<double> first_kernel = shapley_weights(features);
  const double factor = normalization_factor(options.normalization);
  const double subsets = std::ldexp(1.0, static_cast<int>(features - 2));

  if (!options.memoize) {
    check_scorer(scorer, space);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const DirectSums sums = direct_pair_sums(scorer, space, CrossPair{i, m + j},
                                                 pair_kernel.weights(), options.sample_id);
        result.sii(i, j) = factor * sums.weighted;
        result.banzhaf(i, j) = sums.plain / subsets;
      }
    }
    for (std::size_t k = 0; k < features; ++k) {
      result.shapley[k] =
          direct_marginal_sum(scorer, space, k, first_kernel, options.sample_id);
    }
    result.evaluations = m * n * 4 * static_cast<std::size_t>(subsets) +
                         features * 2 * (std::size_t{1} << (features - 1));
    return result;
  }

  const std::vector<double> table = tabulate_values(scorer, space, options);
  result.evaluations = table.size();
  std::vector<double> weighted(m * n);
  std::vector<double> plain(m * n);
  if (options.parallel) {
    kernels::pair_sums(table, m, n, pair_kernel.weights(), weighted, plain);
    kernels::marginal_sums(table, features, first_kernel, result.shapley);
  } else {
    kernels::serial::pair_sums(table, m, n, pair_kernel.weights(), weighted, plain);
    kernels::serial::marginal_sums(table, features, first_kernel, result.shapley);
  }
  for (std::size_t c = 0; c < m * n; ++c) {
    result.sii.flat()[c] = factor * weighted[c];
    result.banzhaf.flat()[c] = plain[c] / subsets;
  }
  return result;
}

ExactResult exact_all(const SyntheticGame& game, const ExactOptions& options) {
  auto scorer = make_game_scorer(game);
  return exact_all(*scorer, game.space(), options);
}

}  // namespace multishap
