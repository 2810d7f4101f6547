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

#ifndef MULTISHAP_CLI_CONFIG_HPP
#define MULTISHAP_CLI_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "multishap/feature_space.hpp"

namespace multishap::cli {

// Flag values from a JSON config file. A run manifest is accepted too, in
// which case its "config" object is used, so a manifest replays its run.
nlohmann::json load_config(const std::filesystem::path& path);

// Scorer endpoint by precedence: flag, then $MULTISHAP_SCORER, then config.
std::optional<std::string> resolve_scorer(const std::optional<std::string>& flag,
                                          const nlohmann::json& config);

// "7x7" -> {7, 7}; throws InvalidArgument otherwise.
GridShape parse_grid(const std::string& text);

}  // namespace multishap::cli

#endif  // MULTISHAP_CLI_CONFIG_HPP
