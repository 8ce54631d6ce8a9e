// Copyright 2026 The Equilink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace equilink {

using BigInt = mpz_class;

/// Lowercase hex without prefix; zero is "0".
std::string to_hex(const BigInt& v);

/// Accepts only [0-9a-f]+. Returns nullopt on anything else.
std::optional<BigInt> from_hex(std::string_view hex);

std::size_t bit_length(const BigInt& v);

}  // namespace equilink
