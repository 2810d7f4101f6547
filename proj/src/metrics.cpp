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

#include "multishap/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "multishap/error.hpp"

namespace multishap {

InstanceMetrics instance_metrics(const Matrix& phi, const Mask& missing) {
  const bool masked = missing.size() != 0;
  if (masked && (missing.rows() != phi.rows() || missing.cols() != phi.cols())) {
    throw InvalidArgument("missing mask shape differs from phi");
  }
  InstanceMetrics out;
  std::size_t used = 0;
  for (std::size_t c = 0; c < phi.size(); ++c) {
    if (masked && missing.flat()[c] != 0) continue;
    const double v = phi.flat()[c];
    if (std::isnan(v)) continue;
    ++used;
    if (v > 0.0) {
      out.synergy += v;
    } else {
      out.suppression -= v;
    }
  }
  if (used == 0) throw InvalidArgument("every interaction cell is missing");
  out.total = out.synergy + out.suppression;
  if (out.total > 0.0) out.ratio = out.synergy / out.total;
  out.coverage = static_cast<double>(used) / static_cast<double>(phi.size());
  return out;
}

InstanceMetrics metrics_from_strengths(double synergy, double suppression) {
  if (synergy < 0.0 || suppression < 0.0) {
    throw InvalidArgument("synergy and suppression strengths must be non-negative");
  }
  InstanceMetrics out;
  out.synergy = synergy;
  out.suppression = suppression;
  out.total = synergy + suppression;
  if (out.total > 0.0) out.ratio = synergy / out.total;
  return out;
}

std::string_view interaction_type_name(InteractionType type) {
  switch (type) {
    case InteractionType::kSynergistic: return "Synergistic";
    case InteractionType::kSuppressive: return "Suppressive";
    case InteractionType::kUndefined: return "Undefined";
  }
  return "Undefined";
}

InteractionType classify_interaction(const InstanceMetrics& metrics) {
  if (!metrics.ratio) return InteractionType::kUndefined;
  return *metrics.ratio > 0.5 ? InteractionType::kSynergistic : InteractionType::kSuppressive;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

namespace {

struct RatioSummary {
  double msr = 0.0;
  double sdr = 0.0;
  std::size_t defined = 0;
};

RatioSummary summarize(std::span<const InstanceMetrics> samples,
                       const std::vector<std::size_t>& members) {
  RatioSummary out;
  double sum = 0.0;
  std::size_t dominant = 0;
  for (std::size_t k : members) {
    if (!samples[k].ratio) continue;
    ++out.defined;
    sum += *samples[k].ratio;
    if (*samples[k].ratio > 0.5) ++dominant;
  }
  if (out.defined > 0) {
    out.msr = sum / static_cast<double>(out.defined);
    out.sdr = static_cast<double>(dominant) / static_cast<double>(out.defined);
  }
  return out;
}

}  // namespace

DatasetMetrics dataset_metrics(std::span<const InstanceMetrics> samples,
                               std::span<const std::string> groups) {
  if (samples.empty()) throw InvalidArgument("dataset metrics need at least one sample");
  if (!groups.empty() && groups.size() != samples.size()) {
    throw InvalidArgument("one group label per sample required");
  }
  std::vector<std::size_t> all(samples.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  const RatioSummary pooled = summarize(samples, all);
  if (pooled.defined == 0) {
    throw InvalidArgument("no sample has a defined synergy ratio (all T = 0)");
  }

  DatasetMetrics out;
  out.msr = pooled.msr;
  out.sdr = pooled.sdr;
  out.n_total = samples.size();
  out.n_defined = pooled.defined;

  if (!groups.empty()) {
    std::map<std::string, std::vector<std::size_t>> by_group;
    for (std::size_t k = 0; k < samples.size(); ++k) by_group[groups[k]].push_back(k);
    std::vector<double> msrs;
    std::vector<double> sdrs;
    for (const auto& [name, members] : by_group) {
      const RatioSummary s = summarize(samples, members);
      if (s.defined == 0) continue;
      out.group_names.push_back(name);
      msrs.push_back(s.msr);
      sdrs.push_back(s.sdr);
    }
    out.msr_across_groups = mean_std(msrs);
    out.sdr_across_groups = mean_std(sdrs);
  }
  return out;
}

std::string format_mean_std(const MeanStd& value, int decimals) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.*f ± %.*f", decimals, value.mean, decimals, value.std);
  return buf;
}

nlohmann::json metrics_to_json(const InstanceMetrics& metrics) {
  nlohmann::json j;
  j["T"] = metrics.total;
  j["S"] = metrics.synergy;
  j["P"] = metrics.suppression;
  j["R"] = metrics.ratio ? nlohmann::json(*metrics.ratio) : nlohmann::json(nullptr);
  j["type"] = interaction_type_name(classify_interaction(metrics));
  j["coverage"] = metrics.coverage;
  return j;
}

InstanceMetrics metrics_from_json(const nlohmann::json& j) {
  try {
    InstanceMetrics m;
    m.total = j.at("T").get<double>();
    m.synergy = j.at("S").get<double>();
    m.suppression = j.at("P").get<double>();
    if (!j.at("R").is_null()) m.ratio = j.at("R").get<double>();
    m.coverage = j.value("coverage", 1.0);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed metrics: ") + e.what());
  }
}

}  // namespace multishap
