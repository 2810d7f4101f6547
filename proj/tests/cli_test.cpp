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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "multishap/cli/config.hpp"
#include "multishap/error.hpp"
#include "multishap/render.hpp"

namespace multishap::cli {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("multishap_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

ExplainOptions explain_options(const std::string& scorer, const fs::path& out) {
  ExplainOptions o;
  o.scorer = scorer;
  o.out = out;
  return o;
}

TEST(Explain, PurePairWritesArtifacts) {
  const fs::path dir = temp_dir("explain");
  ExplainOptions o = explain_options("synthetic:purepair@4x2", dir);
  o.samples = 16;
  o.per_token = true;
  o.csv = true;
  std::ostringstream out, err;
  ASSERT_EQ(run_explain(o, out, err), kExitOk) << err.str();
  for (const char* f : {"sample.phi.json", "sample.phi.csv", "sample.agg.png", "sample.tok0.png",
                        "sample.tok1.png", "sample.manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const MatrixDocument doc = import_matrix(dir / "sample.phi.json");
  EXPECT_EQ(doc.phi(0, 0), 0.5);
  ASSERT_TRUE(doc.metrics);
  EXPECT_EQ(doc.metrics->synergy, 0.5);

  const auto manifest = nlohmann::json::parse(slurp(dir / "sample.manifest.json"));
  EXPECT_EQ(manifest["config"]["K"], 16);
  EXPECT_EQ(manifest["config"]["mode"], "stratified");
  EXPECT_TRUE(manifest.contains("wall_ms"));
  EXPECT_TRUE(manifest.contains("evals_used"));
  EXPECT_EQ(manifest["coverage"], 1.0);
  EXPECT_EQ(manifest["version"], kToolVersion);

  const Image tok = read_png(dir / "sample.tok1.png");
  EXPECT_EQ(tok.text.at("scope").rfind("token 1", 0), 0u);
}

TEST(Explain, UsageErrors) {
  const fs::path dir = temp_dir("usage");
  std::ostringstream out, err;
  ExplainOptions o = explain_options("synthetic:purepair@2x2", dir);
  o.samples = 0;
  EXPECT_EQ(run_explain(o, out, err), kExitUsage);
  o.samples = 4;
  o.scorer = "";
  EXPECT_EQ(run_explain(o, out, err), kExitUsage);
  o.scorer = "synthetic:purepair@2by2";
  EXPECT_EQ(run_explain(o, out, err), kExitUsage);
}

TEST(Explain, MultiSampleScorerNeedsSampleFlag) {
  const fs::path dir = temp_dir("multi");
  const fs::path script = dir / "scorer.sh";
  std::ofstream(script)
      << "#!/bin/sh\n"
         "echo '{\"v\":1,\"m\":1,\"n\":1,\"task\":\"other\",\"deterministic\":true,"
         "\"sample_ids\":[\"a\",\"b\"]}'\n"
         "while read line; do id=$(echo \"$line\" | sed 's/.*\"id\":\\([0-9]*\\).*/\\1/');"
         " echo \"{\\\"id\\\":$id,\\\"scores\\\":[0.0,0.0,0.0,0.0]}\"; done\n";
  fs::permissions(script, fs::perms::owner_all);
  std::ostringstream out, err;
  ExplainOptions o = explain_options("cmd:" + script.string(), dir);
  EXPECT_EQ(run_explain(o, out, err), kExitUsage);
  EXPECT_NE(err.str().find("usage"), std::string::npos);
}

TEST(Explain, ScorerFailureWritesPartialManifest) {
  const fs::path dir = temp_dir("fail");
  std::ostringstream out, err;
  ExplainOptions o = explain_options(
      "cmd:echo '{\"v\":1,\"m\":2,\"n\":2,\"task\":\"other\",\"deterministic\":true}'", dir);
  EXPECT_EQ(run_explain(o, out, err), kExitScorerFailure);
  const auto manifest = nlohmann::json::parse(slurp(dir / "sample.manifest.json"));
  EXPECT_EQ(manifest["status"], "aborted");
  EXPECT_TRUE(manifest.contains("partial"));
  EXPECT_FALSE(fs::exists(dir / "sample.phi.json"));

  o.scorer = "cmd:exit 1";
  EXPECT_EQ(run_explain(o, out, err), kExitScorerFailure);
}

TEST(Explain, StrictCoverageFailure) {
  const fs::path dir = temp_dir("strict");
  ExplainOptions o = explain_options("synthetic:purepair@9x3", dir);
  o.samples = 1;
  o.strict = true;
  std::ostringstream out, err;
  EXPECT_EQ(run_explain(o, out, err), kExitCoverageFailure);
}

TEST(Explain, DeterministicOutputs) {
  const fs::path a = temp_dir("det_a");
  const fs::path b = temp_dir("det_b");
  for (const auto& dir : {a, b}) {
    ExplainOptions o = explain_options("synthetic:multilinear:5@4x3", dir);
    o.samples = 64;
    o.per_token = true;
    std::ostringstream out, err;
    ASSERT_EQ(run_explain(o, out, err), kExitOk);
  }
  EXPECT_EQ(slurp(a / "sample.phi.json"), slurp(b / "sample.phi.json"));
  EXPECT_EQ(slurp(a / "sample.agg.png"), slurp(b / "sample.agg.png"));
  EXPECT_EQ(slurp(a / "sample.tok2.png"), slurp(b / "sample.tok2.png"));
}

TEST(Explain, OverlayOnBaseImage) {
  const fs::path dir = temp_dir("overlay");
  Image base;
  base.width = 8;
  base.height = 8;
  base.rgba.assign(8 * 8 * 4, 128);
  write_png(dir / "base.png", base);
  ExplainOptions o = explain_options("synthetic:purepair@4x1", dir);
  o.image = dir / "base.png";
  o.samples = 8;
  std::ostringstream out, err;
  ASSERT_EQ(run_explain(o, out, err), kExitOk) << err.str();
  EXPECT_EQ(read_png(dir / "sample.agg.png").width, 8u);

  Image odd = base;
  odd.width = 7;
  odd.rgba.resize(7 * 8 * 4);
  write_png(dir / "odd.png", odd);
  o.image = dir / "odd.png";
  EXPECT_EQ(run_explain(o, out, err), kExitUsage);
}

TEST(Batch, SeedsAndSummary) {
  const fs::path dir = temp_dir("batch");
  BatchOptions b;
  b.base = explain_options("synthetic:multilinear:2@3x3", dir);
  b.base.samples = 16;
  b.workers = 2;
  std::ostringstream out, err;
  ASSERT_EQ(run_batch(b, out, err), kExitOk) << err.str();
  for (int s = 0; s < 3; ++s) {
    EXPECT_TRUE(fs::exists(dir / ("seed" + std::to_string(s)) / "sample.phi.json"));
  }
  EXPECT_NE(out.str().find("MSR"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "batch.manifest.json"));
}

TEST(Validate, SpecExamples) {
  ValidateOptions o;
  o.game = "purepair";
  o.m = 3;
  o.n = 2;
  o.samples = 7;
  auto r = validate_game(o);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.oracle, "sii");
  EXPECT_EQ(r.cells[0].estimate, 0.5);

  o.game = "additive";
  o.mode = SamplingMode::kUniform;
  o.samples = 32;
  r = validate_game(o);
  EXPECT_TRUE(r.passed);
  for (const auto& c : r.cells) EXPECT_TRUE(c.missing || c.estimate == 0.0);

  o.game = "multilinear:seed=7";
  o.m = 5;
  o.n = 5;
  o.samples = 4096;
  r = validate_game(o);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.oracle, "banzhaf");
  EXPECT_LE(r.max_evals_used, r.evals_ceiling);
}

TEST(Validate, CommandOutputAndExitCodes) {
  ValidateOptions o;
  o.game = "purepair";
  o.m = 2;
  o.n = 2;
  o.samples = 8;
  o.json = true;
  std::ostringstream out, err;
  EXPECT_EQ(run_validate(o, out, err), kExitOk);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(j["cells"].size(), 4u);

  o.samples = 0;
  EXPECT_EQ(run_validate(o, out, err), kExitUsage);
  o.samples = 8;
  o.game = "nonsense";
  EXPECT_EQ(run_validate(o, out, err), kExitUsage);
}

void write_phi(const fs::path& path, std::vector<double> phi, std::uint64_t seed,
               std::optional<double> accuracy = std::nullopt) {
  MatrixDocument doc;
  doc.sample_id = path.stem().string();
  doc.space = make_space(1, phi.size());
  doc.phi = Matrix(1, phi.size());
  std::copy(phi.begin(), phi.end(), doc.phi.flat().begin());
  doc.evidence = Matrix(1, phi.size(), 1.0);
  doc.missing = Mask(1, phi.size(), 0);
  doc.metrics = instance_metrics(doc.phi);
  doc.accuracy = accuracy;
  doc.manifest = {{"config", {{"seed", seed}}}};
  export_matrix(doc, path);
}

TEST(Report, HandComputedMsrSdr) {
  const fs::path dir = temp_dir("report");
  write_phi(dir / "a.phi.json", {0.6, -0.4}, 0);
  write_phi(dir / "b.phi.json", {0.4, -0.6}, 0);
  std::ostringstream out, err;
  ReportOptions o;
  o.inputs = {dir};
  ASSERT_EQ(run_report(o, out, err), kExitOk) << err.str();
  EXPECT_NE(out.str().find("MSR     0.5000 ± 0.0000"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("SDR     0.5000 ± 0.0000"), std::string::npos) << out.str();
}

TEST(Report, SeedGroupsBoundaryAndCorruptFiles) {
  const fs::path root = temp_dir("report_groups");
  // Seed 0: R = 0.5 and 0.7; seed 1: R = 0.6 and 0.8; seed 2: R = 0.55, zero matrix.
  fs::create_directories(root / "s0");
  fs::create_directories(root / "s1");
  fs::create_directories(root / "s2");
  write_phi(root / "s0/a.phi.json", {0.5, -0.5}, 0, 0.9);
  write_phi(root / "s0/b.phi.json", {0.7, -0.3}, 0, 0.8);
  write_phi(root / "s1/a.phi.json", {0.6, -0.4}, 1, 0.7);
  write_phi(root / "s1/b.phi.json", {0.8, -0.2}, 1, 0.7);
  write_phi(root / "s2/a.phi.json", {0.55, -0.45}, 2);
  write_phi(root / "s2/b.phi.json", {0.0, 0.0}, 2);
  std::ofstream(root / "s2/c.phi.json") << "{\"v\":1,";

  std::ostringstream out, err;
  ReportOptions o;
  o.inputs = {root / "s0", root / "s1", root / "s2"};
  o.json_out = root / "summary.json";
  ASSERT_EQ(run_report(o, out, err), kExitOk) << err.str();
  EXPECT_NE(err.str().find("c.phi.json"), std::string::npos);

  const auto j = nlohmann::json::parse(slurp(root / "summary.json"));
  // Group MSR 0.6, 0.7, 0.55; SDR 0.5, 1.0, 1.0.
  EXPECT_NEAR(j["msr"]["mean"].get<double>(), 0.6166666666666667, 1e-12);
  EXPECT_NEAR(j["msr"]["std"].get<double>(), 0.07637626158259733, 1e-12);
  EXPECT_NEAR(j["sdr"]["mean"].get<double>(), 2.5 / 3.0, 1e-12);
  EXPECT_EQ(j["n_total"], 6);
  EXPECT_EQ(j["n_undefined"], 1);
  EXPECT_EQ(j["files_skipped"], 1);
  EXPECT_NE(out.str().find("MSR     0.6167 ± 0.0764"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("Acc."), std::string::npos);
}

TEST(Report, NothingParsable) {
  const fs::path dir = temp_dir("report_empty");
  std::ofstream(dir / "x.phi.json") << "nope";
  std::ostringstream out, err;
  ReportOptions o;
  o.inputs = {dir};
  EXPECT_EQ(run_report(o, out, err), kExitUsage);
}

TEST(Exact, JsonLines) {
  ExactCommandOptions o;
  o.game = "purepair";
  o.m = 2;
  o.n = 2;
  std::ostringstream out, err;
  ASSERT_EQ(run_exact(o, out, err), kExitOk);
  std::istringstream lines(out.str());
  std::string first;
  std::getline(lines, first);
  auto row = nlohmann::json::parse(first);
  EXPECT_EQ(row["pair"], nlohmann::json::array({0, 0}));
  EXPECT_EQ(row["sii"], 0.5);
  EXPECT_EQ(row["banzhaf"], 1.0);

  o.normalization = Normalization::kClassical;
  std::ostringstream classical;
  ASSERT_EQ(run_exact(o, classical, err), kExitOk);
  EXPECT_EQ(nlohmann::json::parse(classical.str().substr(0, classical.str().find('\n')))["sii"], 1.0);

  o.game = "additive";
  std::ostringstream additive;
  ASSERT_EQ(run_exact(o, additive, err), kExitOk);
  std::istringstream rows(additive.str());
  std::string line;
  while (std::getline(rows, line)) {
    const auto r = nlohmann::json::parse(line);
    if (r.contains("sii")) EXPECT_EQ(r["sii"], 0.0);
    if (r.contains("shapley")) {
      EXPECT_NEAR(r["shapley"].get<double>(), r["feature"].get<double>() + 1.0, 1e-12);
    }
  }

  o.m = 11;
  o.n = 10;
  EXPECT_EQ(run_exact(o, out, err), kExitUsage);
}

TEST(Config, ScorerPrecedence) {
  const nlohmann::json config = {{"scorer", "from-config"}};
  ::unsetenv(kScorerEnv);
  EXPECT_EQ(resolve_scorer(std::nullopt, config), "from-config");
  ::setenv(kScorerEnv, "from-env", 1);
  EXPECT_EQ(resolve_scorer(std::nullopt, config), "from-env");
  EXPECT_EQ(resolve_scorer(std::string("from-flag"), config), "from-flag");
  ::unsetenv(kScorerEnv);
  EXPECT_FALSE(resolve_scorer(std::nullopt, nlohmann::json::object()));
}

TEST(Config, ManifestIsAcceptedAsConfig) {
  const fs::path dir = temp_dir("config");
  std::ofstream(dir / "m.json") << R"({"tool":"multishap","config":{"K":9,"seed":3}})";
  const auto c = load_config(dir / "m.json");
  EXPECT_EQ(c["K"], 9);
  std::ofstream(dir / "bad.json") << "[1,2]";
  EXPECT_THROW(load_config(dir / "bad.json"), InvalidArgument);
  EXPECT_THROW(load_config(dir / "missing.json"), InvalidArgument);
}

TEST(Config, GridParsing) {
  EXPECT_EQ(parse_grid("7x7"), (GridShape{7, 7}));
  EXPECT_THROW(parse_grid("7"), InvalidArgument);
  EXPECT_THROW(parse_grid("0x3"), InvalidArgument);
  EXPECT_THROW(parse_grid("3x"), InvalidArgument);
}

TEST(FileStem, SanitizesIds) {
  EXPECT_EQ(file_stem("coco/000123.jpg"), "coco_000123.jpg");
  EXPECT_EQ(file_stem(""), "_");
  EXPECT_EQ(file_stem(".."), "_..");
}

}  // namespace
}  // namespace multishap::cli
