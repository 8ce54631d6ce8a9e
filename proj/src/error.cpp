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

#include "equilink/error.hpp"

namespace equilink {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::domain: return "domain";
    case Errc::precondition: return "precondition";
    case Errc::config: return "config";
    case Errc::protocol: return "protocol";
    case Errc::framing: return "framing";
    case Errc::transport: return "transport";
    case Errc::aborted: return "aborted";
  }
  return "unknown";
}

void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace equilink
