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

#ifndef MULTISHAP_PROTOCOL_HPP
#define MULTISHAP_PROTOCOL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "multishap/feature_space.hpp"

namespace multishap {

inline constexpr int kProtocolVersion = 1;

enum class Task { kVqaLogit, kRetrievalCosine, kSynthetic, kOther };

std::string_view task_name(Task task);
Task task_from_name(std::string_view name);

// Scorer self-description. The wire form is
//   {"v":1,"m":int,"n":int,"task":str,"deterministic":bool}
// optionally followed by "sample_ids", "grid" and "token_labels".
struct ScorerMeta {
  int protocol_version = kProtocolVersion;
  std::size_t m = 0;
  std::size_t n = 0;
  Task task = Task::kOther;
  bool deterministic = false;
  std::vector<std::string> sample_ids;
  std::optional<GridShape> grid;
  std::vector<std::string> token_labels;

  friend bool operator==(const ScorerMeta&, const ScorerMeta&) = default;
};

// Throws ScorerError on m or n of zero or an unsupported version.
void validate_meta(const ScorerMeta& meta);

// Feature space advertised by a scorer.
FeatureSpace space_from_meta(const ScorerMeta& meta);

struct ScoreRequest {
  std::int64_t id = 0;
  std::string sample_id;
  std::vector<std::vector<std::size_t>> coalitions;  // each sorted ascending

  friend bool operator==(const ScoreRequest&, const ScoreRequest&) = default;
};

struct ScoreResponse {
  std::int64_t id = 0;
  std::vector<double> scores;
};

struct ErrorReply {
  std::int64_t id = 0;
  std::string error;
};

using Reply = std::variant<ScoreResponse, ErrorReply>;

std::int64_t reply_id(const Reply& reply);

// Single-line JSON encodings; keys appear in schema order. Decoders throw
// ScorerError on malformed input.
std::string encode_meta(const ScorerMeta& meta);
ScorerMeta decode_meta(std::string_view text);

std::string encode_request(const ScoreRequest& request);
ScoreRequest decode_request(std::string_view text);

// Throws ScorerError if any score is NaN or infinite.
std::string encode_response(const ScoreResponse& response);
std::string encode_error(const ErrorReply& error);
Reply decode_reply(std::string_view text);

}  // namespace multishap

#endif  // MULTISHAP_PROTOCOL_HPP
