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

// Serial versus OpenMP kernels at the batch sizes one comparison uses:
// 2w table cells, up to 2w prefix products and 2w decryptions.

#include <benchmark/benchmark.h>

#include <map>
#include <vector>

#include "equilink/encoding.hpp"
#include "equilink/kernels.hpp"
#include "equilink/paillier.hpp"
#include "equilink/random.hpp"

namespace {

using namespace equilink;

const KeyPair& key_of(std::size_t bits) {
  static std::map<std::size_t, KeyPair> cache;
  auto it = cache.find(bits);
  if (it == cache.end()) {
    DeterministicRandom rng(bits);
    it = cache.emplace(bits, keygen(bits, rng)).first;
  }
  return it->second;
}

std::vector<kernels::EncryptJob> jobs(const PublicKey& pk, std::size_t count) {
  DeterministicRandom rng(7);
  std::vector<kernels::EncryptJob> out(count);
  for (auto& j : out) {
    j.plaintext = rng.below(pk.modulus());
    j.randomizer = random_unit(pk, rng);
  }
  return out;
}

template <auto Kernel>
void BM_Encrypt(benchmark::State& state) {
  const KeyPair& keys = key_of(static_cast<std::size_t>(state.range(0)));
  const auto batch = jobs(keys.pub, 128);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(keys.pub, batch));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch.size()));
}

template <auto Kernel>
void BM_Decrypt(benchmark::State& state) {
  const KeyPair& keys = key_of(static_cast<std::size_t>(state.range(0)));
  const auto cipher = kernels::serial::encrypt(keys.pub, jobs(keys.pub, 128));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(keys.pub, keys.priv, cipher));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cipher.size()));
}

template <auto Kernel>
void BM_PrefixProducts(benchmark::State& state) {
  const KeyPair& keys = key_of(static_cast<std::size_t>(state.range(0)));
  DeterministicRandom rng(11);
  const EncryptionTable table = build_table(keys.pub, {0x9e3779b97f4a7c15ULL, 64}, rng);
  std::vector<PrefixString> prefixes;
  for (auto& p : zero_encode({0x0123456789abcdefULL, 64})) prefixes.push_back(p);
  for (auto& p : zero_encode({0x0123456789abcdeeULL, 64})) prefixes.push_back(p);
  for (auto _ : state) {
    std::size_t combinations = 0;
    benchmark::DoNotOptimize(Kernel(keys.pub, table, prefixes, combinations));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(prefixes.size()));
}

}  // namespace

BENCHMARK(BM_Encrypt<equilink::kernels::serial::encrypt>)->Name("encrypt/serial")->Arg(512)->Arg(2048);
BENCHMARK(BM_Encrypt<equilink::kernels::parallel::encrypt>)->Name("encrypt/parallel")->Arg(512)->Arg(2048);
BENCHMARK(BM_Decrypt<equilink::kernels::serial::decrypt>)->Name("decrypt/serial")->Arg(512)->Arg(2048);
BENCHMARK(BM_Decrypt<equilink::kernels::parallel::decrypt>)->Name("decrypt/parallel")->Arg(512)->Arg(2048);
BENCHMARK(BM_PrefixProducts<equilink::kernels::serial::prefix_products>)
    ->Name("prefix_products/serial")
    ->Arg(512)
    ->Arg(2048);
BENCHMARK(BM_PrefixProducts<equilink::kernels::parallel::prefix_products>)
    ->Name("prefix_products/parallel")
    ->Arg(512)
    ->Arg(2048);

BENCHMARK_MAIN();
