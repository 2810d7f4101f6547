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

#include "multishap/feature_space.hpp"

#include <algorithm>
#include <bit>

#include "multishap/error.hpp"

namespace multishap {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t universe) {
  return std::max<std::size_t>(1, (universe + kWordBits - 1) / kWordBits);
}

}  // namespace

std::string FeatureSpace::token_label(std::size_t j) const {
  if (j < labels_.size()) return labels_[j];
  return "t" + std::to_string(j);
}

FeatureSpace make_space(std::size_t m, std::size_t n,
                        std::optional<GridShape> grid,
                        std::vector<std::string> token_labels) {
  if (m == 0) throw InvalidArgument("feature space needs at least one patch");
  if (n == 0) throw InvalidArgument("feature space needs at least one token");
  if (grid && grid->rows * grid->cols != m) {
    throw InvalidArgument("patch grid " + std::to_string(grid->rows) + "x" +
                          std::to_string(grid->cols) + " does not cover m=" +
                          std::to_string(m) + " patches");
  }
  if (!token_labels.empty() && token_labels.size() != n) {
    throw InvalidArgument("token_labels has " +
                          std::to_string(token_labels.size()) +
                          " entries, expected n=" + std::to_string(n));
  }
  FeatureSpace space;
  space.m_ = m;
  space.n_ = n;
  space.grid_ = grid;
  space.labels_ = std::move(token_labels);
  return space;
}

nlohmann::json space_to_json(const FeatureSpace& space) {
  nlohmann::json j;
  j["m"] = space.patches();
  j["n"] = space.tokens();
  if (space.grid()) {
    j["grid"] = {space.grid()->rows, space.grid()->cols};
  } else {
    j["grid"] = nullptr;
  }
  j["token_labels"] = space.token_labels();
  return j;
}

FeatureSpace space_from_json(const nlohmann::json& j) {
  try {
    std::optional<GridShape> grid;
    if (j.contains("grid") && !j.at("grid").is_null()) {
      const auto& g = j.at("grid");
      if (!g.is_array() || g.size() != 2) {
        throw FormatError("grid must be [rows, cols]");
      }
      grid = GridShape{g[0].get<std::size_t>(), g[1].get<std::size_t>()};
    }
    std::vector<std::string> labels;
    if (j.contains("token_labels") && !j.at("token_labels").is_null()) {
      labels = j.at("token_labels").get<std::vector<std::string>>();
    }
    return make_space(j.at("m").get<std::size_t>(), j.at("n").get<std::size_t>(),
                      grid, std::move(labels));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed feature space: ") + e.what());
  }
}

Coalition::Coalition(std::size_t universe)
    : universe_(universe), words_(word_count(universe), 0) {}

Coalition Coalition::from_mask(std::size_t universe, std::uint64_t mask) {
  if (universe > kWordBits) {
    throw InvalidArgument("from_mask needs a universe of at most 64 features");
  }
  if (universe < kWordBits && (mask >> universe) != 0) {
    throw InvalidArgument("mask has bits outside the universe");
  }
  Coalition c(universe);
  c.words_[0] = mask;
  return c;
}

std::size_t Coalition::size() const {
  std::size_t count = 0;
  for (std::uint64_t w : words_) count += static_cast<std::size_t>(std::popcount(w));
  return count;
}

bool Coalition::contains(std::size_t k) const {
  if (k >= universe_) return false;
  return (words_[k / kWordBits] >> (k % kWordBits)) & 1U;
}

void Coalition::insert(std::size_t k) {
  if (k >= universe_) {
    throw InvalidArgument("feature index " + std::to_string(k) +
                          " outside universe of " + std::to_string(universe_));
  }
  words_[k / kWordBits] |= std::uint64_t{1} << (k % kWordBits);
}

void Coalition::erase(std::size_t k) {
  if (k >= universe_) return;
  words_[k / kWordBits] &= ~(std::uint64_t{1} << (k % kWordBits));
}

Coalition Coalition::with(std::size_t k) const {
  Coalition c = *this;
  c.insert(k);
  return c;
}

Coalition Coalition::with(std::size_t k, std::size_t l) const {
  Coalition c = *this;
  c.insert(k);
  c.insert(l);
  return c;
}

std::vector<std::size_t> Coalition::indices() const {
  std::vector<std::size_t> out;
  out.reserve(size());
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      out.push_back(w * kWordBits + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

std::uint64_t Coalition::mask() const {
  if (universe_ > kWordBits) {
    throw InvalidArgument("mask() needs a universe of at most 64 features");
  }
  return words_.empty() ? 0 : words_[0];
}

std::size_t Coalition::hash() const {
  // splitmix64 finalizer folded over the words.
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ universe_;
  for (std::uint64_t w : words_) {
    std::uint64_t z = w + h + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    h = z ^ (z >> 31);
  }
  return static_cast<std::size_t>(h);
}

Coalition coalition_from_indices(const FeatureSpace& space,
                                 std::span<const std::size_t> indices,
                                 DuplicatePolicy duplicates) {
  Coalition c(space.total());
  for (std::size_t k : indices) {
    if (k >= space.total()) {
      throw InvalidArgument("feature index " + std::to_string(k) +
                            " out of range [0, " + std::to_string(space.total()) + ")");
    }
    if (duplicates == DuplicatePolicy::kReject && c.contains(k)) {
      throw InvalidArgument("duplicate feature index " + std::to_string(k));
    }
    c.insert(k);
  }
  return c;
}

Coalition full_coalition(std::size_t universe) {
  Coalition c(universe);
  for (std::size_t k = 0; k < universe; ++k) c.insert(k);
  return c;
}

ModalitySplit split_by_modality(const FeatureSpace& space, const Coalition& s) {
  if (s.universe() != space.total()) {
    throw InvalidArgument("coalition universe does not match feature space");
  }
  ModalitySplit split{Coalition(space.total()), Coalition(space.total())};
  for (std::size_t k : s.indices()) {
    if (space.is_patch(k)) {
      split.visual.insert(k);
    } else {
      split.textual.insert(k);
    }
  }
  return split;
}

}  // namespace multishap
