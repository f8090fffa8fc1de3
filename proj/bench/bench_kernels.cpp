// Copyright 2026 The PriLok Authors
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


// Serial vs OpenMP kernels: Reed-Solomon encode/decode and the CEP
// candidate scan.

#include <benchmark/benchmark.h>

#include "prilok/cep.hpp"
#include "prilok/erasure.hpp"
#include "prilok/world.hpp"

namespace {

using prilok::Execution;

prilok::Bytes payload(std::size_t n) {
  prilok::crypto::Drbg rng(7);
  return rng.bytes(n);
}

void BM_RsEncode(benchmark::State& state, Execution exec) {
  prilok::erasure::ReedSolomon rs(2, 4);
  const prilok::Bytes data = payload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rs.encode(data, exec));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}

void BM_RsDecodeParity(benchmark::State& state, Execution exec) {
  prilok::erasure::ReedSolomon rs(2, 4);
  const prilok::Bytes data = payload(static_cast<std::size_t>(state.range(0)));
  auto frags = rs.encode(data, Execution::kSerial);
  std::vector<prilok::erasure::Fragment> parity{frags[2], frags[3]};
  for (auto _ : state) benchmark::DoNotOptimize(rs.decode(parity, data.size(), exec));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}

struct ScanFixture {
  ScanFixture() {
    prilok::ScenarioConfig config;
    config.seed = 11;
    world = prilok::generate_world(config);
    auto model = prilok::observation_model(config);
    std::vector<prilok::Pdr> all;
    for (prilok::Minute m = 0; m < world.duration; ++m) {
      auto pdrs = prilok::observe(world.registry, world.traces, m, model);
      all.insert(all.end(), pdrs.begin(), pdrs.end());
    }
    index = prilok::PdrIndex(std::move(all));
    params = config.analysis.suspicion;
    v = index.phone_index(world.truth.index_cases().front());
    poi = {world.truth.index_cases().front(), 0};
    candidates = prilok::candidate_phones(index, v, 0);
  }
  prilok::World world;
  prilok::PdrIndex index;
  prilok::SuspicionParams params;
  int v = 0;
  prilok::PhoneOfInterest poi;
  std::vector<int> candidates;
};

const ScanFixture& fixture() {
  static const ScanFixture f;
  return f;
}

void BM_ScanCandidates(benchmark::State& state, Execution exec) {
  const ScanFixture& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        prilok::scan_candidates(f.index, f.poi, 0, f.candidates, f.params, &f.world.registry, exec));
  }
  state.counters["candidates"] = static_cast<double>(f.candidates.size());
}

}  // namespace

BENCHMARK_CAPTURE(BM_RsEncode, serial, Execution::kSerial)->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK_CAPTURE(BM_RsEncode, parallel, Execution::kParallel)->Arg(1 << 16)->Arg(1 << 22);
BENCHMARK_CAPTURE(BM_RsDecodeParity, serial, Execution::kSerial)->Arg(1 << 22);
BENCHMARK_CAPTURE(BM_RsDecodeParity, parallel, Execution::kParallel)->Arg(1 << 22);
BENCHMARK_CAPTURE(BM_ScanCandidates, serial, Execution::kSerial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ScanCandidates, parallel, Execution::kParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
