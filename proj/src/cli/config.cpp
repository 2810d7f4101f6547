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

#include "multishap/cli/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

#include "multishap/cli/commands.hpp"
#include "multishap/error.hpp"

namespace multishap::cli {

nlohmann::json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("config file '" + path.string() + "' is not JSON: " + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config file must hold a JSON object");
  if (j.contains("config") && j.at("config").is_object()) return j.at("config");
  return j;
}

std::optional<std::string> resolve_scorer(const std::optional<std::string>& flag,
                                          const nlohmann::json& config) {
  if (flag && !flag->empty()) return flag;
  if (const char* env = std::getenv(kScorerEnv); env != nullptr && *env != '\0') {
    return std::string(env);
  }
  if (config.is_object() && config.contains("scorer") && config.at("scorer").is_string()) {
    return config.at("scorer").get<std::string>();
  }
  return std::nullopt;
}

GridShape parse_grid(const std::string& text) {
  const auto x = text.find('x');
  GridShape g;
  if (x == std::string::npos) throw InvalidArgument("grid must look like <rows>x<cols>");
  auto parse = [&](std::string_view s, std::size_t& v) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || v == 0) {
      throw InvalidArgument("grid must look like <rows>x<cols>, got '" + text + "'");
    }
  };
  parse(std::string_view(text).substr(0, x), g.rows);
  parse(std::string_view(text).substr(x + 1), g.cols);
  return g;
}

}  // namespace multishap::cli
