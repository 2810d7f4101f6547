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

#ifndef MULTISHAP_CLI_COMMANDS_HPP
#define MULTISHAP_CLI_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "multishap/exact.hpp"
#include "multishap/feature_space.hpp"
#include "multishap/sampling.hpp"
#include "multishap/scorer.hpp"

namespace multishap::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kScorerEnv = "MULTISHAP_SCORER";

enum ExitCode : int {
  kExitOk = 0,
  kExitBandViolation = 1,
  kExitScorerFailure = 2,
  kExitCoverageFailure = 3,
  kExitUsage = 4,
};

// Scorer endpoints accepted everywhere a --scorer flag is:
//   cmd:<shell command>            subprocess, JSON lines on stdio
//   http://host:port[/prefix]      GET /meta, POST /score
//   synthetic:<game>@<m>x<n>       in-process game behind the wire codec,
//                                  e.g. synthetic:multilinear:7@5x5
//   synthetic:<fixture.json>       game fixture file
struct ConnectOptions {
  std::size_t max_batch = 64;
  std::size_t max_in_flight = 4;
  int timeout_ms = 60000;
};

std::unique_ptr<ScoreClient> connect_scorer(const std::string& endpoint,
                                            const ConnectOptions& options = {});

struct ExplainOptions {
  std::string scorer;
  std::optional<std::string> sample;
  std::size_t samples = 128;  // K
  SamplingMode mode = SamplingMode::kStratified;
  std::uint64_t seed = 0;
  std::filesystem::path out = ".";
  std::optional<std::filesystem::path> image;
  std::optional<GridShape> grid;
  bool per_token = false;
  bool csv = false;
  bool strict = false;
  std::size_t parallel = 1;
  double alpha = 0.6;
  ConnectOptions connect;
};

int run_explain(const ExplainOptions& options, std::ostream& out, std::ostream& err);

struct BatchOptions {
  ExplainOptions base;
  std::vector<std::string> sample_ids;  // empty: every id the scorer lists
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::size_t workers = 1;
};

int run_batch(const BatchOptions& options, std::ostream& out, std::ostream& err);

struct ValidateOptions {
  std::string game;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t samples = 128;
  SamplingMode mode = SamplingMode::kStratified;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  double density = 0.5;
  bool json = false;
  std::optional<std::filesystem::path> out;
};

struct CellCheck {
  std::size_t patch = 0;
  std::size_t token = 0;  // 0-based within the token group
  double estimate = 0.0;
  double oracle = 0.0;
  double abs_error = 0.0;
  double std_error = 0.0;  // of the (grand) mean
  bool missing = false;
  bool within_band = false;
};

struct ValidateReport {
  bool constant_delta = false;  // exact-match rule instead of the 4-sigma band
  std::string oracle;           // "banzhaf" or "sii"
  std::vector<CellCheck> cells;
  double max_abs_error = 0.0;
  std::size_t violations = 0;
  std::size_t missing_cells = 0;
  std::size_t max_evals_used = 0;
  std::size_t evals_ceiling = 0;  // K (1 + M + m n) + 1
  bool budget_ok = true;
  bool passed = false;
};

// Estimates a synthetic game over `trials` consecutive seeds and checks
// every cell against the exact oracle matching the sampling mode.
ValidateReport validate_game(const ValidateOptions& options);

int run_validate(const ValidateOptions& options, std::ostream& out, std::ostream& err);

struct ReportOptions {
  std::vector<std::filesystem::path> inputs;  // directories or *.phi.json files
  std::optional<std::filesystem::path> json_out;
  int decimals = 4;
};

int run_report(const ReportOptions& options, std::ostream& out, std::ostream& err);

struct ExactCommandOptions {
  std::string game;
  std::size_t m = 0;
  std::size_t n = 0;
  Normalization normalization = Normalization::kPaper;
  std::size_t limit = 20;
  double density = 0.5;
  std::optional<std::filesystem::path> out;
};

int run_exact(const ExactCommandOptions& options, std::ostream& out, std::ostream& err);

// Serves a synthetic game over stdin/stdout (for cmd: endpoints).
int run_synthetic_scorer(const std::string& game, std::size_t m, std::size_t n,
                         std::optional<GridShape> grid);

// File stem safe for any sample id.
std::string file_stem(const std::string& sample_id);

}  // namespace multishap::cli

#endif  // MULTISHAP_CLI_COMMANDS_HPP
