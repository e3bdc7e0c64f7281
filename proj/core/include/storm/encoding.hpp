// Copyright 2026 The StORM Ordinal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace storm {

/// Raised when a code with a 0 -> 1 transition is decoded.
class InvalidCodeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Cumulative ("up-to-k") binary code of an ordinal label.
///
/// A label y in 1..K maps to K-1 bits where bit k (1-indexed) is set iff
/// k < y. Storage is 0-indexed, so bit i is set iff i + 1 < y. Valid codes
/// are monotone non-increasing; arbitrary bit patterns are representable so
/// that unconstrained decoder output can be held and repaired.
class EncodedLabel {
 public:
  /// Holds `bits` as given. Throws std::invalid_argument if empty or if any
  /// entry is not 0/1.
  explicit EncodedLabel(std::vector<std::uint8_t> bits);

  static EncodedLabel zeros(int num_classes);

  int num_classes() const { return static_cast<int>(bits_.size()) + 1; }
  std::size_t size() const { return bits_.size(); }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }

  std::string to_string() const;

  friend bool operator==(const EncodedLabel&, const EncodedLabel&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

EncodedLabel encode_label(int label, int num_classes);

/// Inverse of encode_label. Throws InvalidCodeError on invalid codes.
int decode_label(const EncodedLabel& code);

bool is_valid_code(const EncodedLabel& code);

/// Valid code closest in Hamming distance; ties go to the smaller label.
EncodedLabel nearest_valid_code(const EncodedLabel& code);

}  // namespace storm
