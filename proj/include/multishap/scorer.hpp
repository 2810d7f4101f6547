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

#ifndef MULTISHAP_SCORER_HPP
#define MULTISHAP_SCORER_HPP

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "multishap/feature_space.hpp"
#include "multishap/games.hpp"
#include "multishap/protocol.hpp"

namespace multishap {

// A black box mapping coalitions (masked inputs) to scalar scores.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual ScorerMeta meta() = 0;

  // Scores aligned positionally with `coalitions`.
  virtual std::vector<double> score(std::string_view sample_id,
                                    std::span<const Coalition> coalitions) = 0;

  // True if score() may be called from several threads at once.
  virtual bool concurrent_safe() const { return false; }
};

// In-process scorer around a plain function of the coalition. Batches are
// evaluated with an OpenMP loop when the function is marked thread-safe.
class FunctionScorer : public Scorer {
 public:
  using Fn = std::function<double(const Coalition&)>;

  struct Options {
    bool thread_safe = true;
    // Busy-wait per evaluated coalition, to emulate model latency.
    std::chrono::microseconds delay_per_call{0};
  };

  FunctionScorer(ScorerMeta meta, Fn fn) : FunctionScorer(std::move(meta), std::move(fn), Options{}) {}
  FunctionScorer(ScorerMeta meta, Fn fn, Options options);

  ScorerMeta meta() override { return meta_; }
  std::vector<double> score(std::string_view sample_id,
                            std::span<const Coalition> coalitions) override;
  bool concurrent_safe() const override { return options_.thread_safe; }

  std::uint64_t calls() const { return calls_.load(); }

 private:
  ScorerMeta meta_;
  Fn fn_;
  Options options_;
  std::atomic<std::uint64_t> calls_{0};
};

// Scorer backed by a synthetic game; meta advertises task "synthetic".
std::unique_ptr<FunctionScorer> make_game_scorer(
    SyntheticGame game, FunctionScorer::Options options = {});

// Cosine similarity of two embeddings; throws InvalidArgument on a
// dimension mismatch or a zero-norm vector.
double cosine_score(std::span<const double> visual, std::span<const double> textual);

class Transport;

// Protocol client: batches coalitions into requests, validates replies and
// memoizes scores per (sample_id, coalition) so each distinct coalition is
// sent over the wire at most once.
class ScoreClient : public Scorer {
 public:
  struct Options {
    std::size_t max_batch = 64;
    bool memoize = true;
  };

  explicit ScoreClient(std::unique_ptr<Transport> transport);
  ScoreClient(std::unique_ptr<Transport> transport, Options options);
  ~ScoreClient() override;

  // Performs the handshake on first use and caches the result.
  ScorerMeta meta() override;
  std::vector<double> score(std::string_view sample_id,
                            std::span<const Coalition> coalitions) override;
  bool concurrent_safe() const override { return true; }

  std::string describe() const;
  std::uint64_t wire_evaluations() const { return wire_evals_.load(); }
  std::uint64_t requests_sent() const { return requests_.load(); }

 private:
  std::vector<double> fetch(std::string_view sample_id,
                            std::span<const Coalition> coalitions);

  std::unique_ptr<Transport> transport_;
  std::mutex transport_mutex_;
  Options options_;
  std::mutex meta_mutex_;
  std::optional<ScorerMeta> meta_;
  std::mutex cache_mutex_;
  std::unordered_map<std::string, std::unordered_map<Coalition, double>> cache_;
  std::atomic<std::int64_t> next_id_{1};
  std::atomic<std::uint64_t> wire_evals_{0};
  std::atomic<std::uint64_t> requests_{0};
};

}  // namespace multishap

#endif  // MULTISHAP_SCORER_HPP
