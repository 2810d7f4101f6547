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

#ifndef MULTISHAP_RENDER_HPP
#define MULTISHAP_RENDER_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "multishap/estimator.hpp"
#include "multishap/feature_space.hpp"
#include "multishap/matrix.hpp"
#include "multishap/metrics.hpp"

namespace multishap {

inline constexpr int kMatrixSchemaVersion = 1;

// Row means over the non-missing token cells of each patch. Throws
// InvalidArgument if a row has no present cell.
std::vector<double> aggregate_per_patch(const Matrix& phi, const Mask& missing = {});

// Column j of phi with NaN where missing.
std::vector<double> token_column(const Matrix& phi, const Mask& missing, std::size_t j);

// Interaction matrix as stored on disk.
struct MatrixDocument {
  std::string sample_id;
  FeatureSpace space;
  Matrix phi;        // NaN where missing
  Matrix evidence;
  Mask missing;
  Matrix std_error;  // optional; empty when absent
  std::optional<InstanceMetrics> metrics;
  std::optional<double> accuracy;  // pass-through task accuracy, if supplied
  nlohmann::json manifest = nlohmann::json::object();
};

MatrixDocument make_document(const InteractionEstimate& estimate, const FeatureSpace& space,
                             std::string sample_id, nlohmann::json manifest);

// {"v":1,"sample_id","m","n","grid","token_labels","phi","evidence",
//  "std_error","metrics","accuracy","manifest"}; missing cells are null.
nlohmann::ordered_json document_to_json(const MatrixDocument& doc);
// Throws FormatError on schema violations (shape, label count, version).
MatrixDocument document_from_json(const nlohmann::json& j);

// Header "patch,<token labels...>", one row per patch, empty field when
// missing, numbers with 17 significant digits.
std::string document_to_csv(const MatrixDocument& doc);

void export_matrix(const MatrixDocument& doc, const std::filesystem::path& path);
MatrixDocument import_matrix(const std::filesystem::path& path);

// Writes via a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

struct Rgba {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  std::uint8_t a = 255;

  friend bool operator==(const Rgba&, const Rgba&) = default;
};

inline constexpr Rgba kNeutral{255, 255, 255, 255};
inline constexpr Rgba kSynergyPole{255, 0, 0, 255};
inline constexpr Rgba kSuppressionPole{0, 0, 255, 255};
inline constexpr Rgba kMissingCell{160, 160, 160, 255};

struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgba;  // row-major, 4 bytes per pixel
  std::map<std::string, std::string> text;  // PNG tEXt chunks

  Rgba pixel(std::size_t x, std::size_t y) const;
  void set_pixel(std::size_t x, std::size_t y, Rgba c);
};

struct HeatmapSpec {
  double alpha = 0.6;          // overlay opacity
  std::size_t cell_px = 32;    // standalone cell size
  std::optional<double> bound; // override of the symmetric bound
  std::string scope = "global";
};

// Diverging map: t in [-1, 1], -1 = blue pole, 0 = neutral, +1 = red pole.
Rgba diverging_color(double t);

// max |v| over finite values (0 for none).
double symmetric_bound(std::span<const double> values);

// One cell per value on `grid` (row-major). Without a base image the result
// is a standalone grid of cell_px squares; with one, each cell tints an
// equal pixel block of the base. NaN values render as kMissingCell
// (standalone) or leave the base untouched (overlay). Throws
// InvalidArgument on geometry mismatch.
Image render_heatmap(std::span<const double> values, GridShape grid, const HeatmapSpec& spec,
                     const Image* base = nullptr);

std::vector<std::uint8_t> encode_png(const Image& image);
void write_png(const std::filesystem::path& path, const Image& image);
// Throws FormatError if the file is missing or not a PNG.
Image read_png(const std::filesystem::path& path);

}  // namespace multishap

#endif  // MULTISHAP_RENDER_HPP
