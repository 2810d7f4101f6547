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

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "multishap/cli/commands.hpp"
#include "multishap/cli/config.hpp"
#include "multishap/error.hpp"

namespace {

using multishap::cli::kExitUsage;
using nlohmann::json;

const std::map<std::string, multishap::SamplingMode> kModes{
    {"uniform", multishap::SamplingMode::kUniform},
    {"stratified", multishap::SamplingMode::kStratified}};

const std::map<std::string, multishap::Normalization> kNormalizations{
    {"paper", multishap::Normalization::kPaper},
    {"classical", multishap::Normalization::kClassical}};

// Copies config[key] into `target` unless the flag was given explicitly.
template <typename T>
void fill(const CLI::App& app, const std::string& flag, const json& config,
          const std::string& key, T& target) {
  if (app.count(flag) > 0 || !config.is_object() || !config.contains(key)) return;
  target = config.at(key).get<T>();
}

void fill_mode(const CLI::App& app, const json& config, multishap::SamplingMode& mode) {
  std::string name;
  fill(app, "--mode", config, "mode", name);
  if (!name.empty()) mode = multishap::mode_from_name(name);
}

struct ExplainFlags {
  multishap::cli::ExplainOptions o;
  std::string scorer;
  std::string sample;
  std::string grid;
  std::string image;
  std::string out = ".";
};

void add_explain_flags(CLI::App* cmd, ExplainFlags& f) {
  cmd->add_option("--scorer", f.scorer, "cmd:<command> | http://host:port | synthetic:<game>@<m>x<n>");
  cmd->add_option("--K", f.o.samples, "Number of sampled coalitions")->capture_default_str();
  cmd->add_option("--mode", f.o.mode, "Sampling mode")
      ->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case));
  cmd->add_option("--seed", f.o.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--image", f.image, "PNG to overlay the heatmap on");
  cmd->add_option("--grid", f.grid, "Patch grid as <rows>x<cols>");
  cmd->add_flag("--per-token", f.o.per_token, "Also write one heatmap per token");
  cmd->add_flag("--csv", f.o.csv, "Also write the matrix as CSV");
  cmd->add_flag("--strict", f.o.strict, "Fail when any cell receives no evidence");
  cmd->add_option("--parallel", f.o.parallel, "Concurrent scorer requests")->capture_default_str();
  cmd->add_option("--alpha", f.o.alpha, "Overlay opacity")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--batch-size", f.o.connect.max_batch, "Coalitions per request")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--timeout-ms", f.o.connect.timeout_ms, "Per-request timeout");
}

multishap::cli::ExplainOptions finish_explain(const CLI::App& cmd, ExplainFlags& f,
                                              const json& config) {
  fill(cmd, "--K", config, "K", f.o.samples);
  fill_mode(cmd, config, f.o.mode);
  fill(cmd, "--seed", config, "seed", f.o.seed);
  fill(cmd, "--out", config, "out", f.out);
  fill(cmd, "--image", config, "image", f.image);
  fill(cmd, "--grid", config, "grid", f.grid);
  fill(cmd, "--sample", config, "sample", f.sample);
  fill(cmd, "--per-token", config, "per_token", f.o.per_token);
  fill(cmd, "--csv", config, "csv", f.o.csv);
  fill(cmd, "--strict", config, "strict", f.o.strict);
  fill(cmd, "--parallel", config, "parallel", f.o.parallel);
  fill(cmd, "--alpha", config, "alpha", f.o.alpha);
  fill(cmd, "--batch-size", config, "batch_size", f.o.connect.max_batch);
  fill(cmd, "--timeout-ms", config, "timeout_ms", f.o.connect.timeout_ms);

  multishap::cli::ExplainOptions o = f.o;
  o.scorer = multishap::cli::resolve_scorer(
                 cmd.count("--scorer") ? std::optional<std::string>(f.scorer) : std::nullopt,
                 config)
                 .value_or("");
  if (!f.sample.empty()) o.sample = f.sample;
  if (!f.grid.empty()) o.grid = multishap::cli::parse_grid(f.grid);
  if (!f.image.empty()) o.image = f.image;
  o.out = f.out;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-modal pairwise interaction attribution for black-box scorers", "multishap"};
  app.set_version_flag("--version", multishap::cli::kToolVersion);
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file (or run manifest) supplying flag values");

  ExplainFlags explain;
  CLI::App* explain_cmd = app.add_subcommand("explain", "Estimate the interaction matrix of one sample");
  add_explain_flags(explain_cmd, explain);
  explain_cmd->add_option("--sample", explain.sample, "Sample id");

  ExplainFlags batch;
  multishap::cli::BatchOptions batch_options;
  std::vector<std::string> batch_samples;
  CLI::App* batch_cmd = app.add_subcommand("batch", "Explain many samples over several seeds");
  add_explain_flags(batch_cmd, batch);
  batch_cmd->add_option("--sample", batch_samples, "Sample ids (default: all the scorer lists)");
  batch_cmd->add_option("--seeds", batch_options.seeds, "Seeds")->capture_default_str();
  batch_cmd->add_option("--workers", batch_options.workers, "Samples explained concurrently")
      ->check(CLI::PositiveNumber);

  multishap::cli::ValidateOptions validate;
  std::string validate_out;
  CLI::App* validate_cmd = app.add_subcommand("validate", "Check the estimator against an exact oracle");
  validate_cmd->add_option("--game", validate.game, "additive | purepair | multilinear:<seed>");
  validate_cmd->add_option("--m", validate.m, "Patches");
  validate_cmd->add_option("--n", validate.n, "Tokens");
  validate_cmd->add_option("--K", validate.samples, "Sampled coalitions")->capture_default_str();
  validate_cmd->add_option("--mode", validate.mode, "Sampling mode")
      ->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case));
  validate_cmd->add_option("--trials", validate.trials, "Consecutive seeds")->capture_default_str();
  validate_cmd->add_option("--seed", validate.seed, "First seed");
  validate_cmd->add_option("--density", validate.density, "Pair density of multilinear games");
  validate_cmd->add_flag("--json", validate.json, "Print JSON instead of a table");
  validate_cmd->add_option("--out", validate_out, "Directory for the run manifest");

  multishap::cli::ReportOptions report;
  std::vector<std::string> report_inputs;
  std::string report_json;
  CLI::App* report_cmd = app.add_subcommand("report", "Dataset-level MSR and SDR from phi files");
  report_cmd->add_option("--in", report_inputs, "Directories or .phi.json files");
  report_cmd->add_option("--json", report_json, "Write the JSON summary here");
  report_cmd->add_option("--decimals", report.decimals, "Decimals in the text table")
      ->capture_default_str();

  multishap::cli::ExactCommandOptions exact;
  std::string exact_out;
  CLI::App* exact_cmd = app.add_subcommand("exact", "Exhaustive SII, Banzhaf and Shapley values");
  exact_cmd->add_option("--game", exact.game, "additive | purepair | multilinear:<seed>");
  exact_cmd->add_option("--m", exact.m, "Patches");
  exact_cmd->add_option("--n", exact.n, "Tokens");
  exact_cmd->add_option("--normalization", exact.normalization, "SII normalization")
      ->transform(CLI::CheckedTransformer(kNormalizations, CLI::ignore_case));
  exact_cmd->add_option("--limit", exact.limit, "Largest m+n to enumerate")->capture_default_str();
  exact_cmd->add_option("--density", exact.density, "Pair density of multilinear games");
  exact_cmd->add_option("--out", exact_out, "Directory for the run manifest");

  std::string synth_game;
  std::size_t synth_m = 0;
  std::size_t synth_n = 0;
  std::string synth_grid;
  CLI::App* synth_cmd = app.add_subcommand("synthetic-scorer", "Serve a synthetic game on stdio");
  synth_cmd->group("");
  synth_cmd->add_option("--game", synth_game)->required();
  synth_cmd->add_option("--m", synth_m)->required();
  synth_cmd->add_option("--n", synth_n)->required();
  synth_cmd->add_option("--grid", synth_grid);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    json config = json::object();
    if (!config_path.empty()) config = multishap::cli::load_config(config_path);

    if (*explain_cmd) {
      return multishap::cli::run_explain(finish_explain(*explain_cmd, explain, config), std::cout,
                                         std::cerr);
    }
    if (*batch_cmd) {
      batch_options.base = finish_explain(*batch_cmd, batch, config);
      fill(*batch_cmd, "--seeds", config, "seeds", batch_options.seeds);
      fill(*batch_cmd, "--workers", config, "workers", batch_options.workers);
      if (batch_cmd->count("--sample") == 0 && config.contains("samples") &&
          config["samples"].is_array()) {
        batch_samples = config["samples"].get<std::vector<std::string>>();
      }
      batch_options.sample_ids = batch_samples;
      return multishap::cli::run_batch(batch_options, std::cout, std::cerr);
    }
    if (*validate_cmd) {
      fill(*validate_cmd, "--game", config, "game", validate.game);
      fill(*validate_cmd, "--m", config, "m", validate.m);
      fill(*validate_cmd, "--n", config, "n", validate.n);
      fill(*validate_cmd, "--K", config, "K", validate.samples);
      fill_mode(*validate_cmd, config, validate.mode);
      fill(*validate_cmd, "--trials", config, "trials", validate.trials);
      fill(*validate_cmd, "--seed", config, "seed", validate.seed);
      fill(*validate_cmd, "--density", config, "density", validate.density);
      if (validate.game.empty() || validate.m == 0 || validate.n == 0) {
        std::cerr << "error: validate needs --game, --m and --n\n" << validate_cmd->help();
        return kExitUsage;
      }
      if (!validate_out.empty()) validate.out = validate_out;
      return multishap::cli::run_validate(validate, std::cout, std::cerr);
    }
    if (*report_cmd) {
      if (report_cmd->count("--in") == 0 && config.contains("in")) {
        report_inputs = config["in"].get<std::vector<std::string>>();
      }
      for (const auto& p : report_inputs) report.inputs.emplace_back(p);
      if (!report_json.empty()) report.json_out = report_json;
      return multishap::cli::run_report(report, std::cout, std::cerr);
    }
    if (*exact_cmd) {
      fill(*exact_cmd, "--game", config, "game", exact.game);
      fill(*exact_cmd, "--m", config, "m", exact.m);
      fill(*exact_cmd, "--n", config, "n", exact.n);
      fill(*exact_cmd, "--limit", config, "limit", exact.limit);
      fill(*exact_cmd, "--density", config, "density", exact.density);
      if (exact_cmd->count("--normalization") == 0 && config.contains("normalization")) {
        exact.normalization =
            multishap::normalization_from_name(config["normalization"].get<std::string>());
      }
      if (exact.game.empty() || exact.m == 0 || exact.n == 0) {
        std::cerr << "error: exact needs --game, --m and --n\n" << exact_cmd->help();
        return kExitUsage;
      }
      if (!exact_out.empty()) exact.out = exact_out;
      return multishap::cli::run_exact(exact, std::cout, std::cerr);
    }
    if (*synth_cmd) {
      std::optional<multishap::GridShape> grid;
      if (!synth_grid.empty()) grid = multishap::cli::parse_grid(synth_grid);
      return multishap::cli::run_synthetic_scorer(synth_game, synth_m, synth_n, grid);
    }
  } catch (const multishap::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad config value: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
