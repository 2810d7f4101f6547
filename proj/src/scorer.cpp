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

#include "multishap/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "multishap/error.hpp"
#include "multishap/transport.hpp"

namespace multishap {

namespace {

std::string format_coalition(const Coalition& c) {
  std::ostringstream os;
  os << '[';
  bool first = true;
  for (std::size_t k : c.indices()) {
    if (!first) os << ',';
    os << k;
    first = false;
  }
  os << ']';
  return os.str();
}

void spin_for(std::chrono::microseconds delay) {
  if (delay.count() <= 0) return;
  const auto until = std::chrono::steady_clock::now() + delay;
  while (std::chrono::steady_clock::now() < until) {
  }
}

}  // namespace

FunctionScorer::FunctionScorer(ScorerMeta meta, Fn fn, Options options)
    : meta_(std::move(meta)), fn_(std::move(fn)), options_(options) {
  validate_meta(meta_);
}

std::vector<double> FunctionScorer::score(std::string_view /*sample_id*/,
                                          std::span<const Coalition> coalitions) {
  const std::size_t universe = meta_.m + meta_.n;
  for (const Coalition& c : coalitions) {
    if (c.universe() != universe) {
      throw InvalidArgument("coalition universe " + std::to_string(c.universe()) +
                            " does not match scorer universe " + std::to_string(universe));
    }
  }
  std::vector<double> out(coalitions.size());
  const auto count = static_cast<std::int64_t>(coalitions.size());
  if (options_.thread_safe) {
#pragma omp parallel for schedule(static) if (count > 256)
    for (std::int64_t k = 0; k < count; ++k) {
      spin_for(options_.delay_per_call);
      out[k] = fn_(coalitions[k]);
    }
  } else {
    for (std::int64_t k = 0; k < count; ++k) {
      spin_for(options_.delay_per_call);
      out[k] = fn_(coalitions[k]);
    }
  }
  calls_ += coalitions.size();
  return out;
}

std::unique_ptr<FunctionScorer> make_game_scorer(SyntheticGame game,
                                                 FunctionScorer::Options options) {
  ScorerMeta meta;
  meta.m = game.space().patches();
  meta.n = game.space().tokens();
  meta.task = Task::kSynthetic;
  meta.deterministic = true;
  meta.grid = game.space().grid();
  meta.token_labels = game.space().token_labels();
  auto shared = std::make_shared<const SyntheticGame>(std::move(game));
  return std::make_unique<FunctionScorer>(
      std::move(meta),
      [shared](const Coalition& s) { return evaluate(*shared, s); }, options);
}

double cosine_score(std::span<const double> visual, std::span<const double> textual) {
  if (visual.size() != textual.size()) {
    throw InvalidArgument("embedding dimensions differ: " + std::to_string(visual.size()) +
                          " vs " + std::to_string(textual.size()));
  }
  if (visual.empty()) throw InvalidArgument("embeddings must be non-empty");
  double dot = 0.0;
  double nv = 0.0;
  double nt = 0.0;
  for (std::size_t k = 0; k < visual.size(); ++k) {
    dot += visual[k] * textual[k];
    nv += visual[k] * visual[k];
    nt += textual[k] * textual[k];
  }
  if (nv == 0.0 || nt == 0.0) throw InvalidArgument("zero-norm embedding");
  const double c = dot / (std::sqrt(nv) * std::sqrt(nt));
  return std::clamp(c, -1.0, 1.0);
}

ScoreClient::ScoreClient(std::unique_ptr<Transport> transport, Options options)
    : transport_(std::move(transport)), options_(options) {
  if (options_.max_batch == 0) throw InvalidArgument("max_batch must be positive");
}

ScoreClient::ScoreClient(std::unique_ptr<Transport> transport)
    : ScoreClient(std::move(transport), Options{}) {}

ScoreClient::~ScoreClient() = default;

std::string ScoreClient::describe() const { return transport_->describe(); }

ScorerMeta ScoreClient::meta() {
  std::lock_guard lock(meta_mutex_);
  if (!meta_) {
    ScorerMeta m = transport_->handshake();
    validate_meta(m);
    meta_ = std::move(m);
  }
  return *meta_;
}

std::vector<double> ScoreClient::score(std::string_view sample_id,
                                       std::span<const Coalition> coalitions) {
  const ScorerMeta info = meta();
  const std::size_t universe = info.m + info.n;
  for (const Coalition& c : coalitions) {
    if (c.universe() != universe) {
      throw InvalidArgument("coalition universe " + std::to_string(c.universe()) +
                            " does not match scorer universe " + std::to_string(universe));
    }
  }
  if (!options_.memoize) return fetch(sample_id, coalitions);

  std::vector<double> out(coalitions.size());
  std::vector<Coalition> misses;
  std::vector<std::size_t> slot(coalitions.size(), SIZE_MAX);
  {
    std::unordered_map<Coalition, std::size_t> pending;
    std::lock_guard lock(cache_mutex_);
    auto& cache = cache_[std::string(sample_id)];
    for (std::size_t k = 0; k < coalitions.size(); ++k) {
      if (auto hit = cache.find(coalitions[k]); hit != cache.end()) {
        out[k] = hit->second;
        continue;
      }
      auto [it, inserted] = pending.try_emplace(coalitions[k], misses.size());
      if (inserted) misses.push_back(coalitions[k]);
      slot[k] = it->second;
    }
  }
  if (misses.empty()) return out;

  const std::vector<double> fetched = fetch(sample_id, misses);
  {
    std::lock_guard lock(cache_mutex_);
    auto& cache = cache_[std::string(sample_id)];
    for (std::size_t k = 0; k < misses.size(); ++k) cache.emplace(misses[k], fetched[k]);
  }
  for (std::size_t k = 0; k < coalitions.size(); ++k) {
    if (slot[k] != SIZE_MAX) out[k] = fetched[slot[k]];
  }
  return out;
}

std::vector<double> ScoreClient::fetch(std::string_view sample_id,
                                       std::span<const Coalition> coalitions) {
  std::vector<ScoreRequest> requests;
  for (std::size_t begin = 0; begin < coalitions.size(); begin += options_.max_batch) {
    const std::size_t end = std::min(coalitions.size(), begin + options_.max_batch);
    ScoreRequest r;
    r.id = next_id_++;
    r.sample_id = std::string(sample_id);
    r.coalitions.reserve(end - begin);
    for (std::size_t k = begin; k < end; ++k) r.coalitions.push_back(coalitions[k].indices());
    requests.push_back(std::move(r));
  }

  std::vector<Reply> replies;
  {
    std::lock_guard lock(transport_mutex_);
    replies = transport_->exchange(requests);
  }
  requests_ += requests.size();
  if (replies.size() != requests.size()) {
    throw ScorerError("transport returned " + std::to_string(replies.size()) +
                      " replies for " + std::to_string(requests.size()) + " requests");
  }

  std::vector<double> out;
  out.reserve(coalitions.size());
  std::size_t offset = 0;
  for (std::size_t r = 0; r < requests.size(); ++r) {
    const auto& request = requests[r];
    if (reply_id(replies[r]) != request.id) {
      throw ScorerError("reply id " + std::to_string(reply_id(replies[r])) +
                        " does not echo request id " + std::to_string(request.id));
    }
    if (const auto* err = std::get_if<ErrorReply>(&replies[r])) {
      throw ScorerError("scorer error on request " + std::to_string(request.id) + ": " +
                        err->error);
    }
    const auto& scores = std::get<ScoreResponse>(replies[r]).scores;
    if (scores.size() != request.coalitions.size()) {
      throw ScorerError("length mismatch: request " + std::to_string(request.id) +
                        " sent " + std::to_string(request.coalitions.size()) +
                        " coalitions, got " + std::to_string(scores.size()) + " scores");
    }
    for (std::size_t k = 0; k < scores.size(); ++k) {
      if (!std::isfinite(scores[k])) {
        throw ScorerError("non-finite score for coalition " +
                          format_coalition(coalitions[offset + k]));
      }
      out.push_back(scores[k]);
    }
    offset += scores.size();
    wire_evals_ += scores.size();
  }
  return out;
}

}  // namespace multishap
