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

#ifndef MULTISHAP_ESTIMATOR_HPP
#define MULTISHAP_ESTIMATOR_HPP

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "multishap/error.hpp"
#include "multishap/feature_space.hpp"
#include "multishap/games.hpp"
#include "multishap/matrix.hpp"
#include "multishap/sampling.hpp"
#include "multishap/scorer.hpp"

namespace multishap {

struct EstimatorConfig {
  SamplingMode mode = SamplingMode::kStratified;
  std::size_t samples = 128;  // K, coalitions drawn
  std::uint64_t seed = 0;
  bool strict_missing = false;
  // Concurrent score() calls when the scorer allows it.
  std::size_t max_parallel_scores = 1;
  // Keep every second-order difference in the result.
  bool keep_records = false;
  // OpenMP accumulation kernel; false uses the serial reference.
  bool parallel_kernels = true;
};

nlohmann::json config_to_json(const EstimatorConfig& config);

// One observed second-order difference.
struct DeltaRecord {
  CrossPair pair;
  std::size_t size = 0;  // |S|
  double delta = 0.0;
};

struct InteractionEstimate {
  Matrix phi;        // m x n; NaN where missing
  Matrix evidence;   // sample counts (uniform) or summed weights (stratified)
  Mask missing;      // 1 where the cell received no evidence
  Matrix std_error;  // per-cell standard error; NaN with fewer than 2 records
  std::size_t coalitions = 0;    // K
  std::size_t evals_used = 0;    // distinct coalitions sent to the scorer
  std::size_t evals_budget = 0;  // sum of 1 + a_v + a_t + a_v a_t over contributing draws
  EstimatorConfig config;
  std::vector<DeltaRecord> records;  // only with keep_records

  // Fraction of cells with evidence.
  double coverage() const;
};

// Scorer failure mid-estimate. Carries how far the run got.
class EstimationAborted : public ScorerError {
 public:
  EstimationAborted(const std::string& what, std::size_t coalitions_drawn,
                    std::size_t evals_requested, std::size_t evals_completed)
      : ScorerError(what),
        coalitions_drawn(coalitions_drawn),
        evals_requested(evals_requested),
        evals_completed(evals_completed) {}

  std::size_t coalitions_drawn;
  std::size_t evals_requested;
  std::size_t evals_completed;
};

// v(S+i+j) - v(S+i) - v(S+j) + v(S). Throws InvalidArgument when i or j is
// already in S, ScorerError on a non-finite score.
double second_order_delta(Scorer& scorer, const Coalition& s, CrossPair pair,
                          std::string_view sample_id = {});

// Monte-Carlo estimate of the full m x n cross-modal interaction matrix.
//
// Uniform mode averages the second-order differences of every cell over the
// draws where both features are absent; this converges to the Banzhaf
// interaction. Stratified mode weights each difference by
// stratified_weight(|S|) and halves the self-normalized mean, which converges
// to the 1/2-normalized Shapley interaction index.
//
// Each distinct coalition is scored once. Draws where no cross pair is absent
// are skipped entirely.
InteractionEstimate estimate(Scorer& scorer, const FeatureSpace& space,
                             const EstimatorConfig& config, std::string_view sample_id = {});

// Per-cell standard error from raw records (cells with < 2 records are NaN).
Matrix standard_errors(std::span<const DeltaRecord> records, const FeatureSpace& space,
                       SamplingMode mode);

}  // namespace multishap

#endif  // MULTISHAP_ESTIMATOR_HPP
