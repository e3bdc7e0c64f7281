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

#include "storm/encoding.hpp"

#include <algorithm>

namespace storm {

EncodedLabel::EncodedLabel(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  if (bits_.empty()) {
    throw std::invalid_argument("EncodedLabel: a code needs at least one bit (K >= 2)");
  }
  if (std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b > 1; })) {
    throw std::invalid_argument("EncodedLabel: bits must be 0 or 1");
  }
}

EncodedLabel EncodedLabel::zeros(int num_classes) {
  if (num_classes < 2) {
    throw std::invalid_argument("EncodedLabel: K must be at least 2");
  }
  return EncodedLabel(std::vector<std::uint8_t>(static_cast<std::size_t>(num_classes - 1), 0));
}

std::string EncodedLabel::to_string() const {
  std::string out;
  out.reserve(bits_.size());
  for (auto b : bits_) out.push_back(b ? '1' : '0');
  return out;
}

EncodedLabel encode_label(int label, int num_classes) {
  if (num_classes < 2) {
    throw std::invalid_argument("encode_label: K must be at least 2, got " +
                                std::to_string(num_classes));
  }
  if (label < 1 || label > num_classes) {
    throw std::invalid_argument("encode_label: label " + std::to_string(label) +
                                " outside 1.." + std::to_string(num_classes));
  }
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(num_classes - 1), 0);
  std::fill_n(bits.begin(), label - 1, std::uint8_t{1});
  return EncodedLabel(std::move(bits));
}

bool is_valid_code(const EncodedLabel& code) {
  const auto bits = code.bits();
  for (std::size_t i = 0; i + 1 < bits.size(); ++i) {
    if (bits[i] == 0 && bits[i + 1] == 1) return false;
  }
  return true;
}

int decode_label(const EncodedLabel& code) {
  if (!is_valid_code(code)) {
    throw InvalidCodeError("decode_label: code " + code.to_string() +
                           " contains a forbidden 0->1 transition");
  }
  const auto bits = code.bits();
  return 1 + static_cast<int>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

EncodedLabel nearest_valid_code(const EncodedLabel& code) {
  const auto bits = code.bits();
  const int length = static_cast<int>(bits.size());

  // Distance to the code of label l is (#zeros in bits[0, l-1)) + (#ones in
  // bits[l-1, end)); sweep l upward keeping running counts.
  int ones_after = static_cast<int>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
  int zeros_before = 0;
  int best_label = 1;
  int best_distance = ones_after;
  for (int label = 2; label <= length + 1; ++label) {
    const auto flipped = bits[static_cast<std::size_t>(label - 2)];
    if (flipped == 1) {
      --ones_after;
    } else {
      ++zeros_before;
    }
    const int distance = zeros_before + ones_after;
    if (distance < best_distance) {
      best_distance = distance;
      best_label = label;
    }
  }
  return encode_label(best_label, length + 1);
}

}  // namespace storm
