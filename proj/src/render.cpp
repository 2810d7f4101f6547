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

#include "multishap/render.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "multishap/error.hpp"

namespace multishap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_missing(const Mask& missing, std::size_t c) {
  return missing.size() != 0 && missing.flat()[c] != 0;
}

nlohmann::json rows_or_null(const Matrix& values, const Mask& missing) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < values.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < values.cols(); ++j) {
      const double v = values(i, j);
      const bool absent = is_missing(missing, i * values.cols() + j) || !std::isfinite(v);
      row.push_back(absent ? nlohmann::json(nullptr) : nlohmann::json(v));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix rows_from_json(const nlohmann::json& rows, std::size_t m, std::size_t n,
                      std::string_view field, double fill) {
  if (!rows.is_array() || rows.size() != m) {
    throw FormatError(std::string(field) + " must have m=" + std::to_string(m) + " rows");
  }
  Matrix out(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    if (!rows[i].is_array() || rows[i].size() != n) {
      throw FormatError(std::string(field) + " row " + std::to_string(i) + " must have n=" +
                        std::to_string(n) + " entries");
    }
    for (std::size_t j = 0; j < n; ++j) {
      out(i, j) = rows[i][j].is_null() ? fill : rows[i][j].get<double>();
    }
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<double> aggregate_per_patch(const Matrix& phi, const Mask& missing) {
  std::vector<double> out(phi.rows());
  for (std::size_t i = 0; i < phi.rows(); ++i) {
    double sum = 0.0;
    std::size_t present = 0;
    for (std::size_t j = 0; j < phi.cols(); ++j) {
      const std::size_t c = i * phi.cols() + j;
      if (is_missing(missing, c) || std::isnan(phi.flat()[c])) continue;
      sum += phi.flat()[c];
      ++present;
    }
    if (present == 0) {
      throw InvalidArgument("patch row " + std::to_string(i) + " has no present cells");
    }
    out[i] = sum / static_cast<double>(present);
  }
  return out;
}

std::vector<double> token_column(const Matrix& phi, const Mask& missing, std::size_t j) {
  if (j >= phi.cols()) throw InvalidArgument("token column out of range");
  std::vector<double> out(phi.rows());
  for (std::size_t i = 0; i < phi.rows(); ++i) {
    out[i] = is_missing(missing, i * phi.cols() + j) ? kNaN : phi(i, j);
  }
  return out;
}

MatrixDocument make_document(const InteractionEstimate& estimate, const FeatureSpace& space,
                             std::string sample_id, nlohmann::json manifest) {
  MatrixDocument doc;
  doc.sample_id = std::move(sample_id);
  doc.space = space;
  doc.phi = estimate.phi;
  doc.evidence = estimate.evidence;
  doc.missing = estimate.missing;
  doc.std_error = estimate.std_error;
  if (estimate.coverage() > 0.0) doc.metrics = instance_metrics(estimate.phi, estimate.missing);
  doc.manifest = std::move(manifest);
  return doc;
}

nlohmann::ordered_json document_to_json(const MatrixDocument& doc) {
  nlohmann::ordered_json j;
  j["v"] = kMatrixSchemaVersion;
  j["sample_id"] = doc.sample_id;
  j["m"] = doc.space.patches();
  j["n"] = doc.space.tokens();
  if (doc.space.grid()) {
    j["grid"] = {doc.space.grid()->rows, doc.space.grid()->cols};
  } else {
    j["grid"] = nullptr;
  }
  j["token_labels"] = doc.space.token_labels();
  j["phi"] = rows_or_null(doc.phi, doc.missing);
  j["evidence"] = rows_or_null(doc.evidence, {});
  if (doc.std_error.size() != 0) j["std_error"] = rows_or_null(doc.std_error, doc.missing);
  j["metrics"] = doc.metrics ? metrics_to_json(*doc.metrics) : nlohmann::json(nullptr);
  if (doc.accuracy) j["accuracy"] = *doc.accuracy;
  j["manifest"] = doc.manifest;
  return j;
}

MatrixDocument document_from_json(const nlohmann::json& j) {
  try {
    if (j.at("v").get<int>() != kMatrixSchemaVersion) {
      throw FormatError("unsupported matrix schema version " + j.at("v").dump());
    }
    const auto m = j.at("m").get<std::size_t>();
    const auto n = j.at("n").get<std::size_t>();
    nlohmann::json space_json = {{"m", m}, {"n", n}, {"grid", j.value("grid", nlohmann::json())}};
    space_json["token_labels"] = j.value("token_labels", nlohmann::json::array());
    MatrixDocument doc;
    try {
      doc.space = space_from_json(space_json);
    } catch (const InvalidArgument& e) {
      throw FormatError(e.what());
    }
    doc.sample_id = j.value("sample_id", std::string());
    doc.phi = rows_from_json(j.at("phi"), m, n, "phi", kNaN);
    doc.missing = Mask(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < n; ++k) doc.missing(i, k) = j.at("phi")[i][k].is_null();
    }
    doc.evidence = j.contains("evidence") ? rows_from_json(j.at("evidence"), m, n, "evidence", 0.0)
                                          : Matrix(m, n);
    if (j.contains("std_error") && !j.at("std_error").is_null()) {
      doc.std_error = rows_from_json(j.at("std_error"), m, n, "std_error", kNaN);
    }
    if (j.contains("metrics") && !j.at("metrics").is_null()) {
      doc.metrics = metrics_from_json(j.at("metrics"));
    }
    if (j.contains("accuracy") && !j.at("accuracy").is_null()) {
      doc.accuracy = j.at("accuracy").get<double>();
    }
    if (j.contains("manifest")) doc.manifest = j.at("manifest");
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed matrix document: ") + e.what());
  }
}

std::string document_to_csv(const MatrixDocument& doc) {
  std::ostringstream os;
  os << "patch";
  for (std::size_t j = 0; j < doc.space.tokens(); ++j) {
    os << ',' << csv_escape(doc.space.token_label(j));
  }
  os << '\n';
  for (std::size_t i = 0; i < doc.phi.rows(); ++i) {
    os << 'p' << i;
    for (std::size_t j = 0; j < doc.phi.cols(); ++j) {
      os << ',';
      const double v = doc.phi(i, j);
      if (!is_missing(doc.missing, i * doc.phi.cols() + j) && std::isfinite(v)) {
        os << format_double(v);
      }
    }
    os << '\n';
  }
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw FormatError("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

void export_matrix(const MatrixDocument& doc, const std::filesystem::path& path) {
  if (path.extension() == ".csv") {
    write_file_atomic(path, document_to_csv(doc));
    return;
  }
  write_file_atomic(path, document_to_json(doc).dump(1) + "\n");
}

MatrixDocument import_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
  return document_from_json(j);
}

Rgba Image::pixel(std::size_t x, std::size_t y) const {
  const std::size_t o = (y * width + x) * 4;
  return Rgba{rgba[o], rgba[o + 1], rgba[o + 2], rgba[o + 3]};
}

void Image::set_pixel(std::size_t x, std::size_t y, Rgba c) {
  const std::size_t o = (y * width + x) * 4;
  rgba[o] = c.r;
  rgba[o + 1] = c.g;
  rgba[o + 2] = c.b;
  rgba[o + 3] = c.a;
}

Rgba diverging_color(double t) {
  if (std::isnan(t)) return kMissingCell;
  const double mag = std::min(1.0, std::fabs(t));
  const Rgba pole = t > 0.0 ? kSynergyPole : kSuppressionPole;
  auto lerp = [mag](std::uint8_t from, std::uint8_t to) {
    return static_cast<std::uint8_t>(
        std::lround(static_cast<double>(from) + mag * (static_cast<double>(to) - from)));
  };
  return Rgba{lerp(kNeutral.r, pole.r), lerp(kNeutral.g, pole.g), lerp(kNeutral.b, pole.b), 255};
}

double symmetric_bound(std::span<const double> values) {
  double bound = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) bound = std::max(bound, std::fabs(v));
  }
  return bound;
}

Image render_heatmap(std::span<const double> values, GridShape grid, const HeatmapSpec& spec,
                     const Image* base) {
  if (grid.rows == 0 || grid.cols == 0 || grid.rows * grid.cols != values.size()) {
    throw InvalidArgument("heatmap grid " + std::to_string(grid.rows) + "x" +
                          std::to_string(grid.cols) + " does not match " +
                          std::to_string(values.size()) + " values");
  }
  if (spec.alpha < 0.0 || spec.alpha > 1.0) throw InvalidArgument("alpha must lie in [0, 1]");
  const double bound = spec.bound ? *spec.bound : symmetric_bound(values);

  std::vector<Rgba> colors(values.size());
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (std::isnan(values[c])) {
      colors[c] = kMissingCell;
    } else {
      colors[c] = diverging_color(bound > 0.0 ? values[c] / bound : 0.0);
    }
  }

  Image out;
  out.text["colormap"] = "diverging blue-white-red";
  out.text["normalization"] = "symmetric";
  out.text["scope"] = spec.scope;
  {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", bound);
    out.text["bound"] = buf;
  }

  if (base == nullptr) {
    if (spec.cell_px == 0) throw InvalidArgument("cell_px must be positive");
    out.width = grid.cols * spec.cell_px;
    out.height = grid.rows * spec.cell_px;
    out.rgba.assign(out.width * out.height * 4, 0);
    for (std::size_t y = 0; y < out.height; ++y) {
      for (std::size_t x = 0; x < out.width; ++x) {
        out.set_pixel(x, y, colors[(y / spec.cell_px) * grid.cols + x / spec.cell_px]);
      }
    }
    return out;
  }

  if (base->width % grid.cols != 0 || base->height % grid.rows != 0) {
    throw InvalidArgument("base image " + std::to_string(base->width) + "x" +
                          std::to_string(base->height) + " is not divisible into a " +
                          std::to_string(grid.rows) + "x" + std::to_string(grid.cols) +
                          " grid");
  }
  out.width = base->width;
  out.height = base->height;
  out.rgba = base->rgba;
  out.text["alpha"] = std::to_string(spec.alpha);
  const std::size_t block_w = base->width / grid.cols;
  const std::size_t block_h = base->height / grid.rows;
  for (std::size_t y = 0; y < out.height; ++y) {
    for (std::size_t x = 0; x < out.width; ++x) {
      const std::size_t c = (y / block_h) * grid.cols + x / block_w;
      if (std::isnan(values[c])) continue;
      const Rgba under = base->pixel(x, y);
      const Rgba tint = colors[c];
      auto mix = [&](std::uint8_t b, std::uint8_t t) {
        return static_cast<std::uint8_t>(
            std::lround((1.0 - spec.alpha) * b + spec.alpha * static_cast<double>(t)));
      };
      out.set_pixel(x, y, Rgba{mix(under.r, tint.r), mix(under.g, tint.g), mix(under.b, tint.b),
                               under.a});
    }
  }
  return out;
}

}  // namespace multishap
