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

#ifndef MULTISHAP_METRICS_HPP
#define MULTISHAP_METRICS_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "multishap/matrix.hpp"

namespace multishap {

// Instance-level synergy/suppression summary of an interaction matrix.
struct InstanceMetrics {
  double total = 0.0;        // T = S + P
  double synergy = 0.0;      // S, sum of positive cells
  double suppression = 0.0;  // P, sum of |negative cells|
  std::optional<double> ratio;  // R = S / T, undefined when T == 0
  double coverage = 1.0;     // fraction of cells that contributed
};

// Sums over non-missing cells. `missing` may be empty (no cells missing).
// Throws InvalidArgument when every cell is missing.
InstanceMetrics instance_metrics(const Matrix& phi, const Mask& missing = {});

// Metrics from already-aggregated strengths.
InstanceMetrics metrics_from_strengths(double synergy, double suppression);

enum class InteractionType { kSynergistic, kSuppressive, kUndefined };

std::string_view interaction_type_name(InteractionType type);

// Synergistic iff R > 0.5.
InteractionType classify_interaction(const InstanceMetrics& metrics);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation across groups; 0 for one group
};

struct DatasetMetrics {
  double msr = 0.0;  // mean of defined R
  double sdr = 0.0;  // fraction of defined R strictly above 0.5
  std::size_t n_total = 0;
  std::size_t n_defined = 0;
  // Present when samples were grouped (one group per seed).
  std::optional<MeanStd> msr_across_groups;
  std::optional<MeanStd> sdr_across_groups;
  std::vector<std::string> group_names;
};

// Samples with undefined R are excluded from both MSR and SDR and counted in
// n_total - n_defined. With `groups` (one label per sample) MSR and SDR are
// also computed per group and summarized as mean +- std. Throws
// InvalidArgument when no sample has a defined ratio.
DatasetMetrics dataset_metrics(std::span<const InstanceMetrics> samples,
                               std::span<const std::string> groups = {});

MeanStd mean_std(std::span<const double> values);

// "0.5583 ± 0.0217"
std::string format_mean_std(const MeanStd& value, int decimals = 4);

nlohmann::json metrics_to_json(const InstanceMetrics& metrics);
InstanceMetrics metrics_from_json(const nlohmann::json& j);

}  // namespace multishap

#endif  // MULTISHAP_METRICS_HPP
