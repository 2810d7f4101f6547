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

#ifndef MULTISHAP_CELL_STATS_HPP
#define MULTISHAP_CELL_STATS_HPP

#include <cmath>
#include <cstddef>

namespace multishap {

// Running weighted moments of the second-order differences seen by one
// (patch, token) cell. Values are accumulated relative to the first
// observation, so a constant stream yields its value back exactly and a
// zero spread.
struct CellStats {
  std::size_t count = 0;
  double shift = 0.0;
  double sum_w = 0.0;
  double sum_wd = 0.0;
  double sum_w2 = 0.0;
  double sum_w2d = 0.0;
  double sum_w2d2 = 0.0;
  double sum_d2 = 0.0;

  void add(double delta, double weight) {
    if (count == 0) shift = delta;
    const double d = delta - shift;
    ++count;
    sum_w += weight;
    sum_wd += weight * d;
    sum_w2 += weight * weight;
    sum_w2d += weight * weight * d;
    sum_w2d2 += weight * weight * d * d;
    sum_d2 += d * d;
  }

  bool empty() const { return count == 0 || sum_w == 0.0; }

  // Weighted (self-normalized) mean.
  double mean() const { return shift + sum_wd / sum_w; }

  // Standard error of the plain mean, unit weights assumed.
  double unweighted_stderr() const {
    if (count < 2) return std::nan("");
    const double n = static_cast<double>(count);
    const double var = (sum_d2 - sum_wd * sum_wd / n) / (n - 1.0);
    return var > 0.0 ? std::sqrt(var / n) : 0.0;
  }

  // Delta-method standard error of the self-normalized weighted mean:
  // sqrt(sum w^2 (d - mean)^2) / sum w.
  double self_normalized_stderr() const {
    if (count < 2) return std::nan("");
    const double mu = sum_wd / sum_w;
    const double ss = sum_w2d2 - 2.0 * mu * sum_w2d + mu * mu * sum_w2;
    return ss > 0.0 ? std::sqrt(ss) / sum_w : 0.0;
  }
};

}  // namespace multishap

#endif  // MULTISHAP_CELL_STATS_HPP
