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

#include "multishap/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "multishap/error.hpp"

namespace multishap {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json parse(std::string_view text, std::string_view what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScorerError("malformed " + std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string_view task_name(Task task) {
  switch (task) {
    case Task::kVqaLogit: return "vqa_logit";
    case Task::kRetrievalCosine: return "retrieval_cosine";
    case Task::kSynthetic: return "synthetic";
    case Task::kOther: return "other";
  }
  return "other";
}

Task task_from_name(std::string_view name) {
  if (name == "vqa_logit") return Task::kVqaLogit;
  if (name == "retrieval_cosine") return Task::kRetrievalCosine;
  if (name == "synthetic") return Task::kSynthetic;
  return Task::kOther;
}

void validate_meta(const ScorerMeta& meta) {
  if (meta.protocol_version != kProtocolVersion) {
    throw ScorerError("scorer speaks protocol version " +
                      std::to_string(meta.protocol_version) + ", client supports " +
                      std::to_string(kProtocolVersion));
  }
  if (meta.m == 0 || meta.n == 0) {
    throw ScorerError("scorer meta must advertise m >= 1 and n >= 1");
  }
  if (meta.grid && meta.grid->rows * meta.grid->cols != meta.m) {
    throw ScorerError("scorer grid does not cover m patches");
  }
  if (!meta.token_labels.empty() && meta.token_labels.size() != meta.n) {
    throw ScorerError("scorer token_labels length differs from n");
  }
}

FeatureSpace space_from_meta(const ScorerMeta& meta) {
  validate_meta(meta);
  return make_space(meta.m, meta.n, meta.grid, meta.token_labels);
}

std::int64_t reply_id(const Reply& reply) {
  return std::visit([](const auto& r) { return r.id; }, reply);
}

std::string encode_meta(const ScorerMeta& meta) {
  ordered_json j;
  j["v"] = meta.protocol_version;
  j["m"] = meta.m;
  j["n"] = meta.n;
  j["task"] = task_name(meta.task);
  j["deterministic"] = meta.deterministic;
  if (!meta.sample_ids.empty()) j["sample_ids"] = meta.sample_ids;
  if (meta.grid) j["grid"] = {meta.grid->rows, meta.grid->cols};
  if (!meta.token_labels.empty()) j["token_labels"] = meta.token_labels;
  return j.dump();
}

ScorerMeta decode_meta(std::string_view text) {
  const ordered_json j = parse(text, "scorer meta");
  try {
    ScorerMeta meta;
    if (!j.at("v").is_number_integer()) throw ScorerError("meta \"v\" must be an integer");
    meta.protocol_version = j.at("v").get<int>();
    if (meta.protocol_version != kProtocolVersion) {
      throw ScorerError("protocol version mismatch: scorer v" +
                        std::to_string(meta.protocol_version) + ", client v" +
                        std::to_string(kProtocolVersion));
    }
    const auto m = j.at("m").get<std::int64_t>();
    const auto n = j.at("n").get<std::int64_t>();
    if (m < 1 || n < 1) throw ScorerError("scorer meta must advertise m >= 1 and n >= 1");
    meta.m = static_cast<std::size_t>(m);
    meta.n = static_cast<std::size_t>(n);
    meta.task = task_from_name(j.at("task").get<std::string>());
    meta.deterministic = j.at("deterministic").get<bool>();
    if (j.contains("sample_ids")) {
      meta.sample_ids = j.at("sample_ids").get<std::vector<std::string>>();
    }
    if (j.contains("grid") && !j.at("grid").is_null()) {
      meta.grid = GridShape{j.at("grid").at(0).get<std::size_t>(),
                            j.at("grid").at(1).get<std::size_t>()};
    }
    if (j.contains("token_labels")) {
      meta.token_labels = j.at("token_labels").get<std::vector<std::string>>();
    }
    validate_meta(meta);
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw ScorerError(std::string("malformed scorer meta: ") + e.what());
  }
}

std::string encode_request(const ScoreRequest& request) {
  ordered_json j;
  j["id"] = request.id;
  j["sample_id"] = request.sample_id;
  j["coalitions"] = request.coalitions;
  return j.dump();
}

ScoreRequest decode_request(std::string_view text) {
  const ordered_json j = parse(text, "score request");
  try {
    ScoreRequest r;
    r.id = j.at("id").get<std::int64_t>();
    r.sample_id = j.at("sample_id").get<std::string>();
    r.coalitions = j.at("coalitions").get<std::vector<std::vector<std::size_t>>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ScorerError(std::string("malformed score request: ") + e.what());
  }
}

std::string encode_response(const ScoreResponse& response) {
  for (std::size_t k = 0; k < response.scores.size(); ++k) {
    if (!std::isfinite(response.scores[k])) {
      throw ScorerError("non-finite score at position " + std::to_string(k));
    }
  }
  ordered_json j;
  j["id"] = response.id;
  j["scores"] = response.scores;
  return j.dump();
}

std::string encode_error(const ErrorReply& error) {
  ordered_json j;
  j["id"] = error.id;
  j["error"] = error.error;
  return j.dump();
}

Reply decode_reply(std::string_view text) {
  const ordered_json j = parse(text, "scorer reply");
  try {
    const auto id = j.at("id").get<std::int64_t>();
    if (j.contains("error")) {
      return ErrorReply{id, j.at("error").get<std::string>()};
    }
    ScoreResponse r;
    r.id = id;
    const auto& scores = j.at("scores");
    if (!scores.is_array()) throw ScorerError("\"scores\" must be an array");
    r.scores.reserve(scores.size());
    for (std::size_t k = 0; k < scores.size(); ++k) {
      if (!scores[k].is_number()) {
        throw ScorerError("non-finite or non-numeric score at position " +
                          std::to_string(k) + " of reply " + std::to_string(id));
      }
      r.scores.push_back(scores[k].get<double>());
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ScorerError(std::string("malformed scorer reply: ") + e.what());
  }
}

}  // namespace multishap
