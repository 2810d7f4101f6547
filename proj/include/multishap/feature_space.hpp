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

#ifndef MULTISHAP_FEATURE_SPACE_HPP
#define MULTISHAP_FEATURE_SPACE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "json.hpp"

namespace multishap {

struct GridShape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

// The coalition universe: `patches()` visual features followed by
// `tokens()` textual features. Index k < m is patch k; index m + j is token j.
class FeatureSpace {
 public:
  FeatureSpace() = default;

  std::size_t patches() const { return m_; }
  std::size_t tokens() const { return n_; }
  std::size_t total() const { return m_ + n_; }

  bool is_patch(std::size_t k) const { return k < m_; }
  bool is_token(std::size_t k) const { return k >= m_ && k < m_ + n_; }
  // Global index of token j (0-based within the token group).
  std::size_t token_index(std::size_t j) const { return m_ + j; }

  // Coalitions fit in a single machine word.
  bool bitmask_mode() const { return total() <= 64; }

  const std::optional<GridShape>& grid() const { return grid_; }
  const std::vector<std::string>& token_labels() const { return labels_; }
  // Display label for token j; "t<j>" when no labels were supplied.
  std::string token_label(std::size_t j) const;

  friend bool operator==(const FeatureSpace&, const FeatureSpace&) = default;

 private:
  friend FeatureSpace make_space(std::size_t, std::size_t,
                                 std::optional<GridShape>,
                                 std::vector<std::string>);
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  std::optional<GridShape> grid_;
  std::vector<std::string> labels_;
};

// Throws InvalidArgument on an empty group, a grid whose area differs from
// m, or a label list whose length differs from n.
FeatureSpace make_space(std::size_t m, std::size_t n,
                        std::optional<GridShape> grid = std::nullopt,
                        std::vector<std::string> token_labels = {});

// {"m", "n", "grid": [rows, cols] | null, "token_labels": [...]}.
nlohmann::json space_to_json(const FeatureSpace& space);
FeatureSpace space_from_json(const nlohmann::json& j);

// A subset of [0, universe). Stored as a bitmask; one inline word covers
// universes up to 64 features, larger universes spill to the heap.
class Coalition {
 public:
  Coalition() = default;
  explicit Coalition(std::size_t universe);

  static Coalition from_mask(std::size_t universe, std::uint64_t mask);

  std::size_t universe() const { return universe_; }
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  bool contains(std::size_t k) const;

  void insert(std::size_t k);
  void erase(std::size_t k);
  Coalition with(std::size_t k) const;
  Coalition with(std::size_t k, std::size_t l) const;

  // Members in increasing order.
  std::vector<std::size_t> indices() const;
  // Only valid when universe() <= 64.
  std::uint64_t mask() const;
  std::span<const std::uint64_t> words() const { return {words_.data(), words_.size()}; }

  std::size_t hash() const;

  friend bool operator==(const Coalition& a, const Coalition& b) {
    return a.universe_ == b.universe_ && a.words_ == b.words_;
  }

 private:
  std::size_t universe_ = 0;
  boost::container::small_vector<std::uint64_t, 1> words_;
};

enum class DuplicatePolicy { kMerge, kReject };

// Canonical coalition from an index list in any order. Out-of-range indices
// always throw; duplicates throw only under kReject.
Coalition coalition_from_indices(const FeatureSpace& space,
                                 std::span<const std::size_t> indices,
                                 DuplicatePolicy duplicates = DuplicatePolicy::kMerge);

// Coalition over the full universe with every feature present.
Coalition full_coalition(std::size_t universe);

struct ModalitySplit {
  Coalition visual;   // members < m
  Coalition textual;  // members >= m
};

ModalitySplit split_by_modality(const FeatureSpace& space, const Coalition& s);

}  // namespace multishap

template <>
struct std::hash<multishap::Coalition> {
  std::size_t operator()(const multishap::Coalition& c) const noexcept {
    return c.hash();
  }
};

#endif  // MULTISHAP_FEATURE_SPACE_HPP
