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

#include "equilink/encoding.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "equilink/error.hpp"
#include "equilink/kernels.hpp"

namespace equilink {
namespace {

// Shifts of 64 or more are undefined on uint64_t; prefixes need them at w = 64.
std::uint64_t shr(std::uint64_t v, unsigned s) { return s >= 64 ? 0 : v >> s; }

void check_width(unsigned width) {
  if (width == 0 || width > kMaxWidth) raise(Errc::domain, "width must be in [1, 64]");
}

}  // namespace

std::uint64_t max_value(unsigned width) {
  check_width(width);
  return width == 64 ? UINT64_MAX : (std::uint64_t{1} << width) - 1;
}

EncodedValue EncodedValue::make(std::uint64_t value, unsigned width) {
  if (value > max_value(width)) {
    raise(Errc::domain, std::to_string(value) + " does not fit in " + std::to_string(width) + " bits");
  }
  return EncodedValue{value, width};
}

PrefixString PrefixString::parse(std::string_view symbols) {
  if (symbols.empty() || symbols.size() > kMaxWidth) raise(Errc::domain, "prefix length must be in [1, 64]");
  PrefixString t{0, static_cast<unsigned>(symbols.size())};
  for (char c : symbols) {
    if (c != '0' && c != '1') raise(Errc::domain, "prefix symbols must be 0 or 1");
    t.bits = (t.bits << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return t;
}

std::string PrefixString::str() const {
  std::string out;
  out.reserve(length);
  for (unsigned k = 0; k < length; ++k) out.push_back(symbol(k) ? '1' : '0');
  return out;
}

std::vector<std::uint8_t> to_bits(EncodedValue v) {
  const EncodedValue checked = EncodedValue::make(v.value, v.width);
  std::vector<std::uint8_t> out(checked.width);
  for (unsigned k = 0; k < checked.width; ++k) {
    out[k] = static_cast<std::uint8_t>((checked.value >> (checked.width - 1 - k)) & 1U);
  }
  return out;
}

std::vector<PrefixString> one_encode(EncodedValue v) {
  const EncodedValue x = EncodedValue::make(v.value, v.width);
  std::vector<PrefixString> out;
  for (unsigned pos = x.width; pos >= 1; --pos) {
    if ((x.value >> (pos - 1)) & 1U) out.push_back({shr(x.value, pos - 1), x.width - pos + 1});
  }
  return out;
}

std::vector<PrefixString> zero_encode(EncodedValue v) {
  const EncodedValue y = EncodedValue::make(v.value, v.width);
  std::vector<PrefixString> out;
  for (unsigned pos = y.width; pos >= 1; --pos) {
    if (((y.value >> (pos - 1)) & 1U) == 0) out.push_back({(shr(y.value, pos) << 1) | 1U, y.width - pos + 1});
  }
  return out;
}

EncryptionTable::EncryptionTable(unsigned width, std::vector<std::array<Ciphertext, 2>> columns)
    : width_(width), columns_(std::move(columns)) {
  check_width(width_);
  if (columns_.size() != width_) raise(Errc::domain, "table needs exactly one column per bit position");
}

const Ciphertext& EncryptionTable::cell(unsigned position, unsigned bit) const {
  return columns_.at(position - 1).at(bit);
}

EncryptionTable build_table(const PublicKey& pk, EncodedValue x, RandomSource& rng) {
  x = EncodedValue::make(x.value, x.width);
  if (x.value == 0) raise(Errc::domain, "table value must be at least 1");

  for (;;) {
    // Job 2(i-1) is the encryption of 0 at (i, b_i); job 2(i-1)+1 is its
    // nonzero-decrypting sibling. Randomness is drawn here, serially.
    std::vector<kernels::EncryptJob> jobs;
    jobs.reserve(2 * x.width);
    for (unsigned pos = 1; pos <= x.width; ++pos) {
      jobs.push_back({0, random_unit(pk, rng)});
      jobs.push_back({rng.below(pk.modulus() - 1) + 1, random_unit(pk, rng)});
    }
    std::vector<Ciphertext> cts = kernels::parallel::encrypt(pk, jobs);

    std::vector<std::array<Ciphertext, 2>> columns(x.width);
    for (unsigned pos = 1; pos <= x.width; ++pos) {
      const unsigned bit = static_cast<unsigned>((x.value >> (pos - 1)) & 1U);
      columns[pos - 1][bit] = std::move(cts[2 * (pos - 1)]);
      columns[pos - 1][1 - bit] = std::move(cts[2 * (pos - 1) + 1]);
    }

    // Cells must be pairwise distinct; only toy moduli ever repeat.
    std::set<BigInt> seen;
    for (const auto& col : columns) {
      seen.insert(col[0].value);
      seen.insert(col[1].value);
    }
    if (seen.size() == 2 * static_cast<std::size_t>(x.width)) return EncryptionTable(x.width, std::move(columns));
  }
}

Ciphertext select_product(const PublicKey& pk, const EncryptionTable& table, const PrefixString& t,
                          std::size_t* combinations) {
  if (t.length == 0) raise(Errc::domain, "empty prefix");
  if (t.length > table.width()) raise(Errc::domain, "prefix longer than the table");
  const unsigned w = table.width();
  Ciphertext acc = table.cell(w, t.symbol(0));
  for (unsigned k = 1; k < t.length; ++k) {
    acc = add_encrypted(pk, acc, table.cell(w - k, t.symbol(k)));
    if (combinations) ++*combinations;
  }
  return acc;
}

nlohmann::json table_to_json(const EncryptionTable& table) {
  auto out = nlohmann::json::array();
  for (unsigned pos = table.width(); pos >= 1; --pos) {
    out.push_back({{"pos", pos}, {"c0", to_hex(table.cell(pos, 0).value)}, {"c1", to_hex(table.cell(pos, 1).value)}});
  }
  return out;
}

EncryptionTable table_from_json(const nlohmann::json& j, const PublicKey& pk) {
  if (!j.is_array() || j.empty() || j.size() > kMaxWidth) raise(Errc::framing, "table must be an array of 1..64 columns");
  const auto width = static_cast<unsigned>(j.size());
  std::vector<std::array<Ciphertext, 2>> columns(width);
  for (std::size_t k = 0; k < j.size(); ++k) {
    const auto& col = j[k];
    const unsigned expected_pos = width - static_cast<unsigned>(k);
    if (!col.is_object() || !col.contains("pos") || !col["pos"].is_number_unsigned() ||
        col["pos"].get<unsigned>() != expected_pos) {
      raise(Errc::framing, "table columns must be listed with pos descending from w to 1");
    }
    for (unsigned bit = 0; bit < 2; ++bit) {
      const char* key = bit == 0 ? "c0" : "c1";
      if (!col.contains(key) || !col[key].is_string()) raise(Errc::framing, std::string("table column missing ") + key);
      auto v = from_hex(col[key].get<std::string>());
      if (!v) raise(Errc::framing, "table cell is not lowercase hex");
      Ciphertext c{std::move(*v)};
      pk.check(c);
      columns[expected_pos - 1][bit] = std::move(c);
    }
  }
  return EncryptionTable(width, std::move(columns));
}

}  // namespace equilink
