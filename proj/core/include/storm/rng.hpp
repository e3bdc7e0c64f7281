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
#include <random>
#include <string_view>

namespace storm {

using Rng = std::mt19937_64;

/// Counter-based seed derivation: the seed for (stream, counter) under a
/// master seed is splitmix64 applied to a mix of all three. Any single
/// (stream, counter) cell can be regenerated without replaying the others.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t counter);

/// FNV-1a; stable across platforms, used to turn names into stream ids.
std::uint64_t stable_hash(std::string_view text);

}  // namespace storm
