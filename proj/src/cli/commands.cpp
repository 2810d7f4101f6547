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

#include "multishap/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "multishap/cli/config.hpp"
#include "multishap/error.hpp"
#include "multishap/estimator.hpp"
#include "multishap/games.hpp"
#include "multishap/metrics.hpp"
#include "multishap/render.hpp"
#include "multishap/transport.hpp"

namespace multishap::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kExactTolerance = 1e-12;
constexpr double kBandSigmas = 4.0;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

SyntheticGame parse_synthetic_endpoint(std::string_view spec) {
  const auto at = spec.rfind('@');
  if (at == std::string_view::npos) {
    std::ifstream in{std::string(spec)};
    if (!in) throw InvalidArgument("synthetic endpoint needs <game>@<m>x<n> or a fixture file");
    try {
      return game_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidArgument(std::string("bad game fixture: ") + e.what());
    }
  }
  const GridShape dims = parse_grid(std::string(spec.substr(at + 1)));
  const FeatureSpace space = make_space(dims.rows, dims.cols);
  return game_from_spec(spec.substr(0, at), space);
}

// Picks the sample to explain; nullopt means the flags are insufficient.
std::optional<std::string> choose_sample(const ScorerMeta& meta,
                                         const std::optional<std::string>& requested) {
  if (requested) return requested;
  if (meta.sample_ids.size() > 1) return std::nullopt;
  if (meta.sample_ids.size() == 1) return meta.sample_ids.front();
  return std::string("sample");
}

GridShape default_grid(std::size_t m) {
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(m))));
  if (side * side == m) return GridShape{side, side};
  return GridShape{1, m};
}

FeatureSpace resolve_space(const ScorerMeta& meta, const std::optional<GridShape>& grid_flag) {
  std::optional<GridShape> grid = grid_flag ? grid_flag : meta.grid;
  if (!grid) grid = default_grid(meta.m);
  return make_space(meta.m, meta.n, grid, meta.token_labels);
}

nlohmann::json explain_config_json(const ExplainOptions& o, const std::string& sample) {
  nlohmann::json c;
  c["scorer"] = o.scorer;
  c["sample"] = sample;
  c["K"] = o.samples;
  c["mode"] = mode_name(o.mode);
  c["seed"] = o.seed;
  c["strict"] = o.strict;
  c["parallel"] = o.parallel;
  c["batch_size"] = o.connect.max_batch;
  if (o.grid) c["grid"] = std::to_string(o.grid->rows) + "x" + std::to_string(o.grid->cols);
  return c;
}

struct ExplainOutcome {
  int code = kExitOk;
  std::optional<InstanceMetrics> metrics;
};

// One sample, one seed. `manifest_base` is extended and written alongside.
ExplainOutcome explain_one(Scorer& scorer, const std::string& scorer_name,
                           const FeatureSpace& space, const ExplainOptions& o,
                           const std::string& sample, const fs::path& out_dir,
                           std::ostream& out, std::ostream& err) {
  EstimatorConfig config;
  config.mode = o.mode;
  config.samples = o.samples;
  config.seed = o.seed;
  config.strict_missing = o.strict;
  config.max_parallel_scores = o.parallel;

  const std::string stem = file_stem(sample);
  nlohmann::json manifest;
  manifest["tool"] = "multishap";
  manifest["version"] = kToolVersion;
  manifest["command"] = "explain";
  manifest["config"] = explain_config_json(o, sample);
  manifest["space"] = space_to_json(space);
  manifest["scorer_endpoint"] = scorer_name;
  manifest["normalization"] = o.mode == SamplingMode::kUniform ? "banzhaf" : "paper";
  manifest["colormap"] = "diverging blue-white-red, symmetric about 0";
  const fs::path manifest_path = out_dir / (stem + ".manifest.json");

  const auto started = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
        .count();
  };

  InteractionEstimate result;
  try {
    result = estimate(scorer, space, config, sample);
  } catch (const EstimationAborted& e) {
    manifest["status"] = "aborted";
    manifest["error"] = e.what();
    manifest["partial"] = {{"coalitions_drawn", e.coalitions_drawn},
                           {"evals_requested", e.evals_requested},
                           {"evals_completed", e.evals_completed}};
    manifest["wall_ms"] = elapsed_ms();
    write_file_atomic(manifest_path, manifest.dump(2) + "\n");
    err << "error: scorer failure on sample '" << sample << "': " << e.what() << "\n";
    return {kExitScorerFailure, std::nullopt};
  } catch (const CoverageError& e) {
    manifest["status"] = "coverage_failure";
    manifest["error"] = e.what();
    manifest["wall_ms"] = elapsed_ms();
    write_file_atomic(manifest_path, manifest.dump(2) + "\n");
    err << "error: " << e.what() << "\n";
    return {kExitCoverageFailure, std::nullopt};
  }

  // Deterministic part of the manifest is embedded in the matrix document;
  // timings only go to the standalone manifest.
  manifest["status"] = "ok";
  manifest["evals_used"] = result.evals_used;
  manifest["evals_budget"] = result.evals_budget;
  manifest["coverage"] = result.coverage();
  manifest["undefined_ratio_policy"] = "samples with T = 0 are excluded from MSR and SDR";

  MatrixDocument doc = make_document(result, space, sample, manifest);
  export_matrix(doc, out_dir / (stem + ".phi.json"));
  if (o.csv) export_matrix(doc, out_dir / (stem + ".phi.csv"));

  std::optional<Image> base;
  if (o.image) base = read_png(*o.image);
  const GridShape grid = *space.grid();
  if (result.coverage() > 0.0) {
    HeatmapSpec spec;
    spec.alpha = o.alpha;
    try {
      const std::vector<double> agg = aggregate_per_patch(result.phi, result.missing);
      write_png(out_dir / (stem + ".agg.png"),
                render_heatmap(agg, grid, spec, base ? &*base : nullptr));
    } catch (const InvalidArgument& e) {
      if (base) throw;
      err << "warning: aggregated heatmap skipped: " << e.what() << "\n";
    }
    if (o.per_token) {
      for (std::size_t j = 0; j < space.tokens(); ++j) {
        HeatmapSpec tok = spec;
        tok.scope = "token " + std::to_string(j) + " (" + space.token_label(j) + ")";
        const std::vector<double> column = token_column(result.phi, result.missing, j);
        write_png(out_dir / (stem + ".tok" + std::to_string(j) + ".png"),
                  render_heatmap(column, grid, tok, base ? &*base : nullptr));
      }
    }
  }

  manifest["wall_ms"] = elapsed_ms();
  write_file_atomic(manifest_path, manifest.dump(2) + "\n");

  out << sample << ": ";
  if (doc.metrics) {
    const auto& mt = *doc.metrics;
    out << "T=" << format_number(mt.total) << " S=" << format_number(mt.synergy)
        << " P=" << format_number(mt.suppression) << " R="
        << (mt.ratio ? format_number(*mt.ratio) : std::string("undefined")) << " ("
        << interaction_type_name(classify_interaction(mt)) << ")";
  } else {
    out << "no cell received evidence";
  }
  out << " coverage=" << format_number(result.coverage()) << " evals=" << result.evals_used
      << "\n";
  return {kExitOk, doc.metrics};
}

int exit_code_for(const std::exception_ptr& failure, std::ostream& err) {
  try {
    std::rethrow_exception(failure);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CoverageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCoverageFailure;
  } catch (const ScorerError& e) {
    err << "error: scorer failure: " << e.what() << "\n";
    return kExitScorerFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitScorerFailure;
  }
}

void write_command_manifest(const std::optional<fs::path>& out_dir, const std::string& command,
                            nlohmann::json config, nlohmann::json extra) {
  if (!out_dir) return;
  nlohmann::json manifest = std::move(extra);
  manifest["tool"] = "multishap";
  manifest["version"] = kToolVersion;
  manifest["command"] = command;
  manifest["config"] = std::move(config);
  write_file_atomic(*out_dir / (command + ".manifest.json"), manifest.dump(2) + "\n");
}

}  // namespace

std::string file_stem(const std::string& sample_id) {
  std::string out;
  for (char c : sample_id) {
    const bool safe = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
                      c == '.';
    out += safe ? c : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

std::unique_ptr<ScoreClient> connect_scorer(const std::string& endpoint,
                                            const ConnectOptions& options) {
  ScoreClient::Options client;
  client.max_batch = options.max_batch;
  if (endpoint.starts_with("synthetic:")) {
    std::shared_ptr<Scorer> game =
        make_game_scorer(parse_synthetic_endpoint(std::string_view(endpoint).substr(10)));
    return std::make_unique<ScoreClient>(std::make_unique<LoopbackTransport>(game), client);
  }
  TransportOptions transport;
  transport.timeout = std::chrono::milliseconds(options.timeout_ms);
  transport.max_in_flight = options.max_in_flight;
  return std::make_unique<ScoreClient>(open_transport(endpoint, transport), client);
}

int run_explain(const ExplainOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (o.samples == 0) throw InvalidArgument("--K must be at least 1");
    if (o.scorer.empty()) throw InvalidArgument("a scorer endpoint is required (--scorer or $MULTISHAP_SCORER)");
    std::unique_ptr<ScoreClient> client = connect_scorer(o.scorer, o.connect);
    const ScorerMeta meta = client->meta();
    const auto sample = choose_sample(meta, o.sample);
    if (!sample) {
      err << "error: the scorer serves " << meta.sample_ids.size()
          << " samples; choose one with --sample <id>\n"
          << "usage: multishap explain --scorer <endpoint> --sample <id> [--K 128] "
             "[--mode stratified|uniform] [--seed 0] [--out DIR]\n";
      return kExitUsage;
    }
    const FeatureSpace space = resolve_space(meta, o.grid);
    fs::create_directories(o.out);
    return explain_one(*client, client->describe(), space, o, *sample, o.out, out, err).code;
  } catch (...) {
    return exit_code_for(std::current_exception(), err);
  }
}

int run_batch(const BatchOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const ExplainOptions& o = options.base;
    if (o.samples == 0) throw InvalidArgument("--K must be at least 1");
    if (options.seeds.empty()) throw InvalidArgument("at least one seed is required");
    std::unique_ptr<ScoreClient> client = connect_scorer(o.scorer, o.connect);
    const ScorerMeta meta = client->meta();
    std::vector<std::string> ids = options.sample_ids;
    if (ids.empty()) ids = meta.sample_ids;
    if (ids.empty()) ids.push_back(o.sample.value_or("sample"));
    const FeatureSpace space = resolve_space(meta, o.grid);

    int worst = kExitOk;
    std::vector<InstanceMetrics> collected;
    std::vector<std::string> groups;
    for (std::uint64_t seed : options.seeds) {
      ExplainOptions per_seed = o;
      per_seed.seed = seed;
      const fs::path dir = o.out / ("seed" + std::to_string(seed));
      fs::create_directories(dir);
      const std::size_t workers = std::max<std::size_t>(1, options.workers);
      for (std::size_t begin = 0; begin < ids.size(); begin += workers) {
        const std::size_t end = std::min(ids.size(), begin + workers);
        std::vector<std::future<std::pair<ExplainOutcome, std::string>>> jobs;
        for (std::size_t k = begin; k < end; ++k) {
          jobs.push_back(std::async(std::launch::async, [&, k] {
            std::ostringstream local_out;
            std::ostringstream local_err;
            ExplainOutcome r = explain_one(*client, client->describe(), space, per_seed, ids[k],
                                           dir, local_out, local_err);
            return std::make_pair(r, local_out.str() + local_err.str());
          }));
        }
        for (auto& job : jobs) {
          auto [outcome, text] = job.get();
          out << "[seed " << seed << "] " << text;
          worst = std::max(worst, outcome.code);
          if (outcome.metrics) {
            collected.push_back(*outcome.metrics);
            groups.push_back(std::to_string(seed));
          }
        }
      }
    }
    nlohmann::json summary;
    if (!collected.empty()) {
      bool any_defined = false;
      for (const auto& mt : collected) any_defined = any_defined || mt.ratio.has_value();
      if (any_defined) {
        const DatasetMetrics d = dataset_metrics(collected, groups);
        out << "MSR " << format_mean_std(*d.msr_across_groups) << "\n"
            << "SDR " << format_mean_std(*d.sdr_across_groups) << "\n";
        summary = {{"msr", {{"mean", d.msr_across_groups->mean}, {"std", d.msr_across_groups->std}}},
                   {"sdr", {{"mean", d.sdr_across_groups->mean}, {"std", d.sdr_across_groups->std}}}};
      }
    }
    nlohmann::json config = explain_config_json(o, "");
    config.erase("sample");
    config["seeds"] = options.seeds;
    config["samples"] = ids;
    config["workers"] = options.workers;
    write_command_manifest(o.out, "batch", config,
                           {{"summary", summary}, {"status", worst == kExitOk ? "ok" : "partial"}});
    return worst;
  } catch (...) {
    return exit_code_for(std::current_exception(), err);
  }
}

ValidateReport validate_game(const ValidateOptions& o) {
  if (o.samples == 0) throw InvalidArgument("--K must be at least 1");
  if (o.trials == 0) throw InvalidArgument("--trials must be at least 1");
  const FeatureSpace space = make_space(o.m, o.n);
  const SyntheticGame game = game_from_spec(o.game, space, o.density);
  auto scorer = make_game_scorer(game);

  ValidateReport report;
  report.constant_delta = game.kind() != GameKind::kMultilinear;
  report.oracle = o.mode == SamplingMode::kUniform ? "banzhaf" : "sii";
  const ExactResult exact = exact_all(*scorer, space);
  const Matrix& oracle = o.mode == SamplingMode::kUniform ? exact.banzhaf : exact.sii;

  const std::size_t cells = o.m * o.n;
  std::vector<double> sum(cells, 0.0);
  std::vector<double> sum_sq(cells, 0.0);
  std::vector<double> last_se(cells, std::nan(""));
  std::vector<std::size_t> seen(cells, 0);
  report.evals_ceiling = o.samples * (1 + space.total() + cells) + 1;

  for (std::size_t t = 0; t < o.trials; ++t) {
    EstimatorConfig config;
    config.mode = o.mode;
    config.samples = o.samples;
    config.seed = o.seed + t;
    const InteractionEstimate est = estimate(*scorer, space, config);
    report.max_evals_used = std::max(report.max_evals_used, est.evals_used);
    if (est.evals_used > report.evals_ceiling) report.budget_ok = false;
    for (std::size_t c = 0; c < cells; ++c) {
      if (est.missing.flat()[c] != 0) continue;
      const double v = est.phi.flat()[c];
      sum[c] += v;
      sum_sq[c] += v * v;
      last_se[c] = est.std_error.flat()[c];
      ++seen[c];
    }
  }

  for (std::size_t c = 0; c < cells; ++c) {
    CellCheck check;
    check.patch = c / o.n;
    check.token = c % o.n;
    check.oracle = oracle.flat()[c];
    if (seen[c] == 0) {
      check.missing = true;
      ++report.missing_cells;
      report.cells.push_back(check);
      continue;
    }
    const double k = static_cast<double>(seen[c]);
    check.estimate = sum[c] / k;
    if (seen[c] == 1) {
      check.std_error = last_se[c];
    } else {
      // Standard error of the grand mean from the spread across trials.
      const double var = std::max(0.0, (sum_sq[c] - sum[c] * sum[c] / k) / (k - 1.0));
      check.std_error = std::sqrt(var / k);
    }
    check.abs_error = std::fabs(check.estimate - check.oracle);
    if (report.constant_delta) {
      check.within_band = check.abs_error <= kExactTolerance;
    } else {
      check.within_band = std::isfinite(check.std_error)
                              ? check.abs_error <= kBandSigmas * check.std_error + kExactTolerance
                              : check.abs_error <= kExactTolerance;
    }
    report.max_abs_error = std::max(report.max_abs_error, check.abs_error);
    if (!check.within_band) ++report.violations;
    report.cells.push_back(check);
  }
  report.passed = report.violations == 0 && report.budget_ok;
  return report;
}

int run_validate(const ValidateOptions& o, std::ostream& out, std::ostream& err) {
  ValidateReport report;
  try {
    report = validate_game(o);
  } catch (...) {
    return exit_code_for(std::current_exception(), err);
  }
  if (o.json) {
    nlohmann::json j;
    j["oracle"] = report.oracle;
    j["rule"] = report.constant_delta ? "exact" : "4-sigma";
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& c : report.cells) {
      rows.push_back({{"pair", {c.patch, c.token}},
                      {"estimate", c.missing ? nlohmann::json() : nlohmann::json(c.estimate)},
                      {"oracle", c.oracle},
                      {"abs_error", c.abs_error},
                      {"std_error", std::isfinite(c.std_error) ? nlohmann::json(c.std_error)
                                                               : nlohmann::json()},
                      {"missing", c.missing},
                      {"ok", c.missing || c.within_band}});
    }
    j["cells"] = rows;
    j["max_abs_error"] = report.max_abs_error;
    j["violations"] = report.violations;
    j["missing_cells"] = report.missing_cells;
    j["max_evals_used"] = report.max_evals_used;
    j["evals_ceiling"] = report.evals_ceiling;
    j["passed"] = report.passed;
    out << j.dump() << "\n";
  } else {
    out << "oracle: exact " << report.oracle << " ("
        << (report.constant_delta ? "exact match within 1e-12" : "4 sigma band") << ")\n";
    out << std::left << std::setw(6) << "patch" << std::setw(6) << "token" << std::setw(20)
        << "estimate" << std::setw(20) << "oracle" << std::setw(14) << "abs_err"
        << std::setw(14) << "stderr"
        << "ok\n";
    for (const auto& c : report.cells) {
      out << std::setw(6) << c.patch << std::setw(6) << c.token << std::setw(20)
          << (c.missing ? std::string("missing") : format_number(c.estimate)) << std::setw(20)
          << format_number(c.oracle) << std::setw(14) << format_number(c.abs_error)
          << std::setw(14) << format_number(c.std_error)
          << (c.missing ? "-" : (c.within_band ? "yes" : "NO")) << "\n";
    }
    out << "max_abs_error=" << format_number(report.max_abs_error)
        << " violations=" << report.violations << " missing=" << report.missing_cells
        << " max_evals_used=" << report.max_evals_used
        << " ceiling=" << report.evals_ceiling << "\n";
    out << (report.passed ? "PASS" : "FAIL") << "\n";
  }
  write_command_manifest(o.out, "validate",
                         {{"game", o.game}, {"m", o.m}, {"n", o.n}, {"K", o.samples},
                          {"mode", mode_name(o.mode)}, {"trials", o.trials}, {"seed", o.seed},
                          {"density", o.density}},
                         {{"passed", report.passed},
                          {"max_abs_error", report.max_abs_error},
                          {"max_evals_used", report.max_evals_used}});
  return report.passed ? kExitOk : kExitBandViolation;
}

namespace {

std::vector<fs::path> collect_matrix_files(const fs::path& input) {
  std::vector<fs::path> files;
  if (fs::is_directory(input)) {
    for (const auto& entry : fs::directory_iterator(input)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.ends_with(".phi.json")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(input);
  }
  return files;
}

}  // namespace

int run_report(const ReportOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (o.inputs.empty()) throw InvalidArgument("report needs at least one --in path");
    std::vector<InstanceMetrics> metrics;
    std::vector<std::string> groups;
    std::vector<double> accuracy;
    std::vector<std::string> accuracy_groups;
    std::size_t skipped = 0;
    for (std::size_t d = 0; d < o.inputs.size(); ++d) {
      for (const fs::path& file : collect_matrix_files(o.inputs[d])) {
        try {
          const MatrixDocument doc = import_matrix(file);
          const InstanceMetrics mt = instance_metrics(doc.phi, doc.missing);
          std::string group = o.inputs[d].string();
          if (doc.manifest.is_object() && doc.manifest.contains("config") &&
              doc.manifest["config"].contains("seed")) {
            group = "seed " + doc.manifest["config"]["seed"].dump();
          }
          metrics.push_back(mt);
          groups.push_back(group);
          if (doc.accuracy) {
            accuracy.push_back(*doc.accuracy);
            accuracy_groups.push_back(group);
          }
        } catch (const std::exception& e) {
          ++skipped;
          err << "warning: skipping '" << file.string() << "': " << e.what() << "\n";
        }
      }
    }
    if (metrics.empty()) throw FormatError("no parsable interaction matrices found");

    const DatasetMetrics d = dataset_metrics(metrics, groups);
    std::optional<MeanStd> acc;
    if (!accuracy.empty()) {
      std::map<std::string, std::vector<double>> by_group;
      for (std::size_t k = 0; k < accuracy.size(); ++k) by_group[accuracy_groups[k]].push_back(accuracy[k]);
      std::vector<double> means;
      for (const auto& [g, values] : by_group) means.push_back(mean_std(values).mean);
      acc = mean_std(means);
    }

    out << std::left << std::setw(8) << "Metric" << "Value\n";
    if (acc) out << std::setw(8) << "Acc." << format_mean_std(*acc, o.decimals) << "\n";
    out << std::setw(8) << "MSR" << format_mean_std(*d.msr_across_groups, o.decimals) << "\n";
    out << std::setw(8) << "SDR" << format_mean_std(*d.sdr_across_groups, o.decimals) << "\n";
    out << "samples=" << d.n_total << " defined=" << d.n_defined
        << " undefined=" << d.n_total - d.n_defined << " groups=" << d.group_names.size()
        << " skipped=" << skipped << "\n";

    nlohmann::json j;
    j["msr"] = {{"mean", d.msr_across_groups->mean}, {"std", d.msr_across_groups->std}};
    j["sdr"] = {{"mean", d.sdr_across_groups->mean}, {"std", d.sdr_across_groups->std}};
    j["pooled"] = {{"msr", d.msr}, {"sdr", d.sdr}};
    if (acc) j["acc"] = {{"mean", acc->mean}, {"std", acc->std}};
    j["groups"] = d.group_names;
    j["n_total"] = d.n_total;
    j["n_defined"] = d.n_defined;
    j["n_undefined"] = d.n_total - d.n_defined;
    j["files_skipped"] = skipped;
    j["undefined_ratio_policy"] = "samples with T = 0 are excluded from MSR and SDR";
    j["std"] = "sample standard deviation across groups";
    if (o.json_out) {
      write_file_atomic(*o.json_out, j.dump(2) + "\n");
      nlohmann::json config;
      std::vector<std::string> inputs;
      for (const auto& p : o.inputs) inputs.push_back(p.string());
      config["in"] = inputs;
      write_command_manifest(o.json_out->parent_path().empty() ? fs::path(".")
                                                                : o.json_out->parent_path(),
                             "report", config, {{"status", "ok"}});
    } else {
      out << j.dump() << "\n";
    }
    return kExitOk;
  } catch (...) {
    return exit_code_for(std::current_exception(), err);
  }
}

int run_exact(const ExactCommandOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const FeatureSpace space = make_space(o.m, o.n);
    if (space.total() > o.limit) {
      throw InvalidArgument("M=" + std::to_string(space.total()) +
                            " exceeds the exhaustive limit of " + std::to_string(o.limit) +
                            " (raise it with --limit)");
    }
    const SyntheticGame game = game_from_spec(o.game, space, o.density);
    ExactOptions options;
    options.max_features = o.limit;
    options.normalization = o.normalization;
    const ExactResult r = exact_all(game, options);
    for (std::size_t i = 0; i < o.m; ++i) {
      for (std::size_t j = 0; j < o.n; ++j) {
        nlohmann::ordered_json row;
        row["pair"] = {i, j};
        row["sii"] = r.sii(i, j);
        row["banzhaf"] = r.banzhaf(i, j);
        out << row.dump() << "\n";
      }
    }
    for (std::size_t k = 0; k < space.total(); ++k) {
      nlohmann::ordered_json row;
      row["feature"] = k;
      row["shapley"] = r.shapley[k];
      out << row.dump() << "\n";
    }
    write_command_manifest(o.out, "exact",
                           {{"game", o.game}, {"m", o.m}, {"n", o.n},
                            {"normalization", normalization_name(o.normalization)},
                            {"limit", o.limit}, {"density", o.density}},
                           {{"status", "ok"}, {"evals_used", r.evaluations}});
    return kExitOk;
  } catch (...) {
    return exit_code_for(std::current_exception(), err);
  }
}

int run_synthetic_scorer(const std::string& game, std::size_t m, std::size_t n,
                         std::optional<GridShape> grid) {
  const FeatureSpace space = make_space(m, n, grid);
  auto scorer = make_game_scorer(game_from_spec(game, space));
  return serve_stdio(*scorer, stdin, stdout);
}

}  // namespace multishap::cli
