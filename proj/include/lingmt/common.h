// Copyright 2026 The lingmt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ==============================================================================

// Error types, seeded random streams and small string helpers shared by every
// module.

#ifndef LINGMT_COMMON_H_
#define LINGMT_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lingmt {

// Base of every error the toolkit throws. kind() is a stable short token used
// as the machine-parsable prefix of CLI failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

// Malformed input text. line() is 1-based; offset() is a byte offset; either
// may be -1 when not applicable.
class FormatError : public Error {
 public:
  FormatError(const std::string& message, long line = -1, long offset = -1);
  long line() const { return line_; }
  long offset() const { return offset_; }

 private:
  long line_;
  long offset_;
};

class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& message)
      : Error("invariant", message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error("config", message) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& message) : Error("shape", message) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& message)
      : Error("numeric", message) {}
};

class TruncationError : public Error {
 public:
  explicit TruncationError(const std::string& message)
      : Error("truncation", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io", message) {}
};

uint64_t fnv1a64(std::string_view data);
uint64_t splitmix64(uint64_t x);

// Seed of the named sub-stream `stream` under `root`.
uint64_t derive_seed(uint64_t root, std::string_view stream);

// Seeded pseudo-random stream. Only the engine comes from the standard
// library; the distributions are written out so draws are identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, n). n must be positive.
  uint64_t below(uint64_t n);
  double normal();
  // Normal(0, stddev) resampled until within two standard deviations.
  double truncated_normal(double stddev);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// String helpers.
std::vector<std::string> split_whitespace(std::string_view text);
std::vector<std::string_view> split_lines(std::string_view text);
std::string_view trim(std::string_view text);
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);
std::string hex64(uint64_t value);

}  // namespace lingmt

#endif  // LINGMT_COMMON_H_
