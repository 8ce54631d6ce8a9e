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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace equilink {

struct Record {
  std::int64_t id = 0;
  std::string first_name;
  std::string last_name;
  std::string ssn;  // nine digits
  std::string dob;  // YYYY-MM-DD in [1920-01-01, 2010-12-31]

  friend bool operator==(const Record&, const Record&) = default;
};

struct DatasetPair {
  std::vector<Record> a;
  std::vector<Record> b;
};

/// Two shuffled datasets sharing exactly `overlap` identical records. All
/// other records, and every id and SSN, are globally distinct. The same
/// arguments always produce the same output.
/// Throws Errc::config if overlap exceeds either count.
DatasetPair generate_pair(std::size_t count_a, std::size_t count_b, std::size_t overlap, std::uint64_t seed);

/// Keys in the order id, first_name, last_name, ssn, dob.
nlohmann::ordered_json record_to_json(const Record& r);
Record record_from_json(const nlohmann::json& j);

std::string to_jsonl(const std::vector<Record>& records);
void write_jsonl(const std::filesystem::path& path, const std::vector<Record>& records);
std::vector<Record> read_jsonl(const std::filesystem::path& path);

/// Field text used for linkage: "id", "first_name", "last_name", "ssn" or "dob".
std::string field_value(const Record& r, std::string_view field);

}  // namespace equilink
