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

#include "multishap/estimator.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <unordered_map>

#include "multishap/cell_stats.hpp"
#include "multishap/kernels.hpp"

namespace multishap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_config(const EstimatorConfig& config) {
  if (config.samples == 0) throw InvalidArgument("K must be at least 1");
  if (config.mode != SamplingMode::kUniform && config.mode != SamplingMode::kStratified) {
    throw InvalidArgument("unknown sampling mode");
  }
}

std::string describe_coalition(const Coalition& c) {
  std::string out = "[";
  for (std::size_t k : c.indices()) {
    if (out.size() > 1) out += ',';
    out += std::to_string(k);
  }
  return out + "]";
}

// Coalition -> value slot, in first-request order.
class SlotTable {
 public:
  std::uint32_t slot(Coalition c) {
    auto [it, inserted] =
        index_.try_emplace(c, static_cast<std::uint32_t>(coalitions_.size()));
    if (inserted) coalitions_.push_back(std::move(c));
    return it->second;
  }
  const std::vector<Coalition>& coalitions() const { return coalitions_; }

 private:
  std::unordered_map<Coalition, std::uint32_t> index_;
  std::vector<Coalition> coalitions_;
};

std::vector<double> score_all(Scorer& scorer, std::span<const Coalition> coalitions,
                              std::string_view sample_id, const EstimatorConfig& config,
                              std::size_t& completed) {
  completed = 0;
  std::vector<double> values(coalitions.size());
  const std::size_t workers =
      scorer.concurrent_safe() ? std::max<std::size_t>(1, config.max_parallel_scores) : 1;
  if (workers == 1 || coalitions.size() < 2 * workers) {
    values = scorer.score(sample_id, coalitions);
    if (values.size() != coalitions.size()) {
      throw ScorerError("scorer returned " + std::to_string(values.size()) + " scores for " +
                        std::to_string(coalitions.size()) + " coalitions");
    }
    completed = values.size();
  } else {
    // Contiguous ranges, results written by position.
    const std::size_t per = (coalitions.size() + workers - 1) / workers;
    std::vector<std::future<std::vector<double>>> parts;
    for (std::size_t begin = 0; begin < coalitions.size(); begin += per) {
      const auto range = coalitions.subspan(begin, std::min(per, coalitions.size() - begin));
      parts.push_back(std::async(std::launch::async, [&scorer, range, sample_id] {
        return scorer.score(sample_id, range);
      }));
    }
    std::size_t offset = 0;
    std::exception_ptr failure;
    for (auto& part : parts) {
      try {
        const std::vector<double> got = part.get();
        std::copy(got.begin(), got.end(), values.begin() + static_cast<std::ptrdiff_t>(offset));
        offset += got.size();
        completed += got.size();
      } catch (...) {
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) {
      throw ScorerError("non-finite score for coalition " + describe_coalition(coalitions[k]));
    }
  }
  return values;
}

double sample_weight(SamplingMode mode, std::size_t size, std::size_t features) {
  return mode == SamplingMode::kUniform ? 1.0 : stratified_weight(size, features);
}

void finalize_cell(const CellStats& stats, SamplingMode mode, double& phi, double& evidence,
                   unsigned char& missing, double& std_error) {
  if (stats.empty()) {
    phi = kNaN;
    evidence = 0.0;
    missing = 1;
    std_error = kNaN;
    return;
  }
  missing = 0;
  if (mode == SamplingMode::kUniform) {
    phi = stats.mean();
    evidence = static_cast<double>(stats.count);
    std_error = stats.unweighted_stderr();
  } else {
    phi = 0.5 * stats.mean();
    evidence = stats.sum_w;
    std_error = 0.5 * stats.self_normalized_stderr();
  }
}

}  // namespace

nlohmann::json config_to_json(const EstimatorConfig& config) {
  return {{"mode", mode_name(config.mode)},
          {"K", config.samples},
          {"seed", config.seed},
          {"strict", config.strict_missing},
          {"parallel", config.max_parallel_scores}};
}

double InteractionEstimate::coverage() const {
  if (missing.size() == 0) return 0.0;
  std::size_t present = 0;
  for (unsigned char flag : missing.flat()) present += flag == 0 ? 1 : 0;
  return static_cast<double>(present) / static_cast<double>(missing.size());
}

double second_order_delta(Scorer& scorer, const Coalition& s, CrossPair pair,
                          std::string_view sample_id) {
  if (s.contains(pair.patch) || s.contains(pair.token)) {
    throw InvalidArgument("second-order difference needs both features absent from S");
  }
  if (pair.patch >= s.universe() || pair.token >= s.universe() || pair.patch == pair.token) {
    throw InvalidArgument("pair outside the coalition universe");
  }
  const std::vector<Coalition> terms{s.with(pair.patch, pair.token), s.with(pair.patch),
                                     s.with(pair.token), s};
  const std::vector<double> v = scorer.score(sample_id, terms);
  for (std::size_t t = 0; t < terms.size(); ++t) {
    if (!std::isfinite(v[t])) {
      throw ScorerError("non-finite score for coalition " + describe_coalition(terms[t]));
    }
  }
  return v[0] - v[1] - v[2] + v[3];
}

InteractionEstimate estimate(Scorer& scorer, const FeatureSpace& space,
                             const EstimatorConfig& config, std::string_view sample_id) {
  check_config(config);
  const ScorerMeta meta = scorer.meta();
  if (meta.m != space.patches() || meta.n != space.tokens()) {
    throw InvalidArgument("scorer advertises m=" + std::to_string(meta.m) +
                          ", n=" + std::to_string(meta.n) +
                          ", feature space has m=" + std::to_string(space.patches()) +
                          ", n=" + std::to_string(space.tokens()));
  }
  const std::size_t m = space.patches();
  const std::size_t n = space.tokens();
  const std::size_t features = space.total();

  Rng rng(config.seed);
  SlotTable slots;
  std::vector<kernels::SampleSlots> samples(config.samples);
  std::size_t budget = 0;
  std::vector<std::size_t> absent_patches;
  std::vector<std::size_t> absent_tokens;

  for (kernels::SampleSlots& sample : samples) {
    const Coalition s = sample_coalition(rng, config.mode, features);
    sample.size = static_cast<std::uint32_t>(s.size());
    sample.weight = sample_weight(config.mode, s.size(), features);
    sample.single.assign(features, kernels::kNoSlot);
    sample.pair.assign(m * n, kernels::kNoSlot);

    absent_patches.clear();
    absent_tokens.clear();
    for (std::size_t k = 0; k < features; ++k) {
      if (s.contains(k)) continue;
      (space.is_patch(k) ? absent_patches : absent_tokens).push_back(k);
    }
    if (absent_patches.empty() || absent_tokens.empty()) continue;

    sample.base = slots.slot(s);
    for (std::size_t i : absent_patches) sample.single[i] = slots.slot(s.with(i));
    for (std::size_t j : absent_tokens) sample.single[j] = slots.slot(s.with(j));
    for (std::size_t i : absent_patches) {
      for (std::size_t j : absent_tokens) {
        sample.pair[i * n + (j - m)] = slots.slot(s.with(i, j));
      }
    }
    budget += 1 + absent_patches.size() + absent_tokens.size() +
              absent_patches.size() * absent_tokens.size();
  }

  std::vector<double> values;
  std::size_t completed = 0;
  try {
    values = score_all(scorer, slots.coalitions(), sample_id, config, completed);
  } catch (const ScorerError& e) {
    throw EstimationAborted(e.what(), config.samples, slots.coalitions().size(), completed);
  }

  std::vector<CellStats> cells(m * n);
  if (config.parallel_kernels) {
    kernels::accumulate_cells(samples, values, m, n, cells);
  } else {
    kernels::serial::accumulate_cells(samples, values, m, n, cells);
  }

  InteractionEstimate result;
  result.phi = Matrix(m, n);
  result.evidence = Matrix(m, n);
  result.missing = Mask(m, n);
  result.std_error = Matrix(m, n);
  result.coalitions = config.samples;
  result.evals_used = slots.coalitions().size();
  result.evals_budget = budget;
  result.config = config;
  for (std::size_t c = 0; c < m * n; ++c) {
    finalize_cell(cells[c], config.mode, result.phi.flat()[c], result.evidence.flat()[c],
                  result.missing.flat()[c], result.std_error.flat()[c]);
  }

  if (config.keep_records) {
    for (std::size_t c = 0; c < m * n; ++c) {
      const std::size_t i = c / n;
      const std::size_t j = m + c % n;
      for (const auto& sample : samples) {
        if (sample.pair[c] == kernels::kNoSlot) continue;
        const double delta = values[sample.pair[c]] - values[sample.single[i]] -
                             values[sample.single[j]] + values[sample.base];
        result.records.push_back(DeltaRecord{CrossPair{i, j}, sample.size, delta});
      }
    }
  }

  if (config.strict_missing && result.coverage() < 1.0) {
    std::size_t absent = 0;
    for (unsigned char flag : result.missing.flat()) absent += flag;
    throw CoverageError(std::to_string(absent) + " of " + std::to_string(m * n) +
                        " cells received no evidence (K=" + std::to_string(config.samples) +
                        ")");
  }
  return result;
}

Matrix standard_errors(std::span<const DeltaRecord> records, const FeatureSpace& space,
                       SamplingMode mode) {
  const std::size_t m = space.patches();
  const std::size_t n = space.tokens();
  std::vector<CellStats> cells(m * n);
  for (const DeltaRecord& r : records) {
    if (!space.is_patch(r.pair.patch) || !space.is_token(r.pair.token)) {
      throw InvalidArgument("record pair is not a (patch, token) pair");
    }
    cells[r.pair.patch * n + (r.pair.token - m)].add(
        r.delta, sample_weight(mode, r.size, space.total()));
  }
  Matrix out(m, n);
  for (std::size_t c = 0; c < m * n; ++c) {
    out.flat()[c] = mode == SamplingMode::kUniform
                        ? cells[c].unweighted_stderr()
                        : 0.5 * cells[c].self_normalized_stderr();
  }
  return out;
}

}  // namespace multishap
