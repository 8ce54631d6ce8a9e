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

#include "equilink/datagen.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <unordered_set>

#include "equilink/error.hpp"
#include "equilink/random.hpp"

namespace equilink {
namespace {

constexpr std::array<std::string_view, 48> kFirstNames = {
    "Ada",    "Alan",   "Alice",  "Amir",    "Ana",     "Ben",    "Bob",     "Carla",  "Chen",   "Chloe",
    "Dana",   "David",  "Elena",  "Eli",     "Farah",   "Felix",  "Grace",   "Hana",   "Hugo",   "Ines",
    "Ivan",   "Jamal",  "Jin",    "Julia",   "Kai",     "Karen",  "Leo",     "Lina",   "Luis",   "Maya",
    "Mei",    "Nadia",  "Noah",   "Omar",    "Priya",   "Quinn",  "Rosa",    "Sam",    "Sofia",  "Tariq",
    "Tess",   "Uma",    "Victor", "Wen",     "Xavier",  "Yara",   "Yusuf",   "Zoe"};

constexpr std::array<std::string_view, 48> kLastNames = {
    "Abbott",   "Alvarez", "Baker",   "Banerjee", "Brooks",  "Castillo", "Chen",     "Cohen",   "Diaz",
    "Dubois",   "Evans",   "Fischer", "Garcia",   "Gupta",   "Hansen",   "Hughes",   "Ibrahim", "Ito",
    "Jensen",   "Kim",     "Kowalski", "Lee",     "Lopez",   "Martin",   "Meyer",    "Nakamura", "Nguyen",
    "Novak",    "Okafor",  "Olsen",   "Patel",    "Perez",   "Quinn",    "Reyes",    "Rossi",   "Sato",
    "Schmidt",  "Silva",   "Singh",   "Smith",    "Tanaka",  "Torres",   "Usman",    "Varga",   "Walker",
    "Wong",     "Young",   "Zhang"};

constexpr std::int64_t kIdSpace = 1'000'000'000;
constexpr std::uint64_t kSsnSpace = 1'000'000'000;

std::string format_date(std::chrono::sys_days day) {
  const std::chrono::year_month_day ymd(day);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

class RecordFactory {
 public:
  explicit RecordFactory(std::uint64_t seed) : rng_(seed) {
    using namespace std::chrono;
    first_day_ = sys_days(year{1920} / January / 1);
    const sys_days last = sys_days(year{2010} / December / 31);
    day_span_ = static_cast<std::uint64_t>((last - first_day_).count()) + 1;
  }

  Record next() {
    Record r;
    do {
      r.id = static_cast<std::int64_t>(rng_.below(static_cast<std::uint64_t>(kIdSpace - 1))) + 1;
    } while (!ids_.insert(r.id).second);
    std::uint64_t ssn = 0;
    do {
      ssn = rng_.below(kSsnSpace);
    } while (!ssns_.insert(ssn).second);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%09llu", static_cast<unsigned long long>(ssn));
    r.ssn = buf;
    r.first_name = kFirstNames[rng_.below(kFirstNames.size())];
    r.last_name = kLastNames[rng_.below(kLastNames.size())];
    r.dob = format_date(first_day_ + std::chrono::days(static_cast<int>(rng_.below(day_span_))));
    return r;
  }

  RandomSource& rng() { return rng_; }

 private:
  DeterministicRandom rng_;
  std::chrono::sys_days first_day_;
  std::uint64_t day_span_ = 0;
  std::unordered_set<std::int64_t> ids_;
  std::unordered_set<std::uint64_t> ssns_;
};

const nlohmann::json& required(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) raise(Errc::config, std::string("record missing field '") + name + "'");
  return j.at(name);
}

std::string string_field(const nlohmann::json& j, const char* name) {
  const auto& v = required(j, name);
  if (!v.is_string()) raise(Errc::config, std::string("record field '") + name + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

DatasetPair generate_pair(std::size_t count_a, std::size_t count_b, std::size_t overlap, std::uint64_t seed) {
  if (overlap > count_a || overlap > count_b) raise(Errc::config, "overlap exceeds a dataset size");
  if (count_a + count_b - overlap >= static_cast<std::size_t>(kIdSpace) / 2) {
    raise(Errc::config, "too many records for the id space");
  }
  RecordFactory factory(seed);
  DatasetPair out;
  out.a.reserve(count_a);
  out.b.reserve(count_b);
  for (std::size_t i = 0; i < overlap; ++i) {
    Record r = factory.next();
    out.a.push_back(r);
    out.b.push_back(std::move(r));
  }
  for (std::size_t i = overlap; i < count_a; ++i) out.a.push_back(factory.next());
  for (std::size_t i = overlap; i < count_b; ++i) out.b.push_back(factory.next());
  shuffle(out.a, factory.rng());
  shuffle(out.b, factory.rng());
  return out;
}

nlohmann::ordered_json record_to_json(const Record& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["first_name"] = r.first_name;
  j["last_name"] = r.last_name;
  j["ssn"] = r.ssn;
  j["dob"] = r.dob;
  return j;
}

Record record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) raise(Errc::config, "record must be a JSON object");
  Record r;
  const auto& id = required(j, "id");
  if (!id.is_number_integer()) raise(Errc::config, "record field 'id' must be an integer");
  r.id = id.get<std::int64_t>();
  r.first_name = string_field(j, "first_name");
  r.last_name = string_field(j, "last_name");
  r.ssn = string_field(j, "ssn");
  r.dob = string_field(j, "dob");
  return r;
}

std::string to_jsonl(const std::vector<Record>& records) {
  std::string out;
  for (const auto& r : records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Record>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::config, "cannot open '" + path.string() + "' for writing");
  out << to_jsonl(records);
  if (!out) raise(Errc::config, "write to '" + path.string() + "' failed");
}

std::vector<Record> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::config, "cannot open '" + path.string() + "'");
  std::vector<Record> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      raise(Errc::config, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string field_value(const Record& r, std::string_view field) {
  if (field == "id") return std::to_string(r.id);
  if (field == "first_name") return r.first_name;
  if (field == "last_name") return r.last_name;
  if (field == "ssn") return r.ssn;
  if (field == "dob") return r.dob;
  raise(Errc::config, "unknown record field '" + std::string(field) + "'");
}

}  // namespace equilink
