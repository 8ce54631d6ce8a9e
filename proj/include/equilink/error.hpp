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

#include <stdexcept>
#include <string>
#include <string_view>

namespace equilink {

enum class Errc {
  domain,        // argument outside the mathematical domain of an operation
  precondition,  // caller broke a documented precondition (e.g. unsorted input)
  config,        // bad configuration or key material
  protocol,      // peer sent something the protocol does not allow
  framing,       // wire bytes could not be decoded
  transport,     // I/O failure or timeout
  aborted,       // peer sent ABORT
};

std::string_view to_string(Errc code);

/// Every failure raised by the library. The code drives CLI exit JSON.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& what);

}  // namespace equilink
