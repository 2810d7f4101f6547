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

#ifndef MULTISHAP_ERROR_HPP
#define MULTISHAP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace multishap {

// Precondition violations on caller-supplied values (bad sizes, indices,
// flags). The CLI maps these to the usage exit code.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Anything that goes wrong talking to a scorer: transport, protocol, a
// non-finite score, a version mismatch.
class ScorerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Interaction cells without evidence when strict coverage was requested.
class CoverageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed files (matrix JSON, CSV, PNG, fixtures).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace multishap

#endif  // MULTISHAP_ERROR_HPP
