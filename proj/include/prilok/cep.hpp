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

// Complex event processing over decrypted PDR streams: suspicion finding and
// scoring, completion of findings, contamination records, the infection DAG
// and hotspot maps. Every entry point takes a federation capability.

#ifndef PRILOK_CEP_HPP_
#define PRILOK_CEP_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prilok/cep_types.hpp"
#include "prilok/execution.hpp"
#include "prilok/federation.hpp"
#include "prilok/pdr.hpp"
#include "prilok/world.hpp"

namespace prilok {

// Read-only index over decrypted records, sorted by (minute, phone, code).
class PdrIndex {
 public:
  PdrIndex() = default;
  explicit PdrIndex(std::vector<Pdr> records);
  static PdrIndex from_sets(std::span<const PdrSet> sets);

  std::size_t size() const { return records_.size(); }
  const std::vector<Pdr>& records() const { return records_; }
  const std::vector<PhoneId>& phones() const { return phones_; }
  // Dense id of a phone, or -1.
  int phone_index(const PhoneId& phone) const;

  struct PhoneSlice {
    int phone = 0;  // dense id
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
  };
  struct MinuteSlice {
    Minute minute = 0;
    std::uint32_t begin = 0;  // into records()
    std::uint32_t end = 0;
    std::vector<PhoneSlice> phones;  // sorted by phone
  };

  const std::vector<MinuteSlice>& minutes() const { return minutes_; }
  // First slice with minute >= m.
  std::size_t lower_bound(Minute m) const;
  const MinuteSlice* slice(Minute m) const;
  // Records of one phone in one minute, sorted by code; empty if absent.
  std::span<const Pdr> records(const MinuteSlice& slice, int phone) const;
  std::span<const Pdr> records(Minute minute, const PhoneId& phone) const;

 private:
  std::vector<Pdr> records_;
  std::vector<PhoneId> phones_;
  std::vector<MinuteSlice> minutes_;
};

// Highest precision first, then the lowest code.
bool better_pdr(const Pdr& a, const Pdr& b);

// Per-minute proximity of two phones from their records in that minute.
// With a shared station: law of cosines at the best shared station. Without
// one, and only when `registry` is given, the distance between the positions
// of each phone's best record resolved through the registry.
std::optional<ProxSample> minute_proximity(std::span<const Pdr> v_records,
                                           std::span<const Pdr> u_records,
                                           const ProviderRegistry* registry);

// Splits qualifying samples (ascending minutes) into windows.
std::vector<ContactWindow> build_windows(std::vector<ProxSample> samples, const SuspicionParams& params);

// Serial reference and OpenMP kernel of the candidate scan: one suspicion per
// candidate that has at least one window, sorted by u.
std::vector<ContactSuspicion> scan_candidates(const PdrIndex& index, const PhoneOfInterest& poi,
                                              Minute scan_start, std::span<const int> candidates,
                                              const SuspicionParams& params,
                                              const ProviderRegistry* registry, Execution exec);

// First minute the scan considers.
Minute scan_start(const PhoneOfInterest& poi, const SuspicionParams& params, Minute t_incub);
// Phones (dense ids) observed in some minute >= start in which v is observed.
std::vector<int> candidate_phones(const PdrIndex& index, int v, Minute start);

struct CepContext {
  const Capability* capability = nullptr;
  const ProviderRegistry* registry = nullptr;  // used only with the Resolve right
  SuspicionParams suspicion;
  ScoringConfig scoring;
  Minute t_incub = 0;  // scales lookback_fraction
  Execution exec = Execution::kParallel;
};

// Needs ReadEncrypted (BLIND_ANALYSIS or higher) on an active capability.
std::vector<ContactSuspicion> find_suspicions(const CepContext& ctx, const PdrIndex& index,
                                              const PhoneOfInterest& poi);

int score_class(double raw, const ScoringConfig& config);
double raw_score(const ScoreTerms& terms, const SuspicionParams& params, const ScoringConfig& config);

// Throws kNoEvidence for a suspicion without a qualifying window.
ContactScore score_suspicion(const CepContext& ctx, const PdrIndex& index,
                             const ContactSuspicion& suspicion);
std::vector<ContactScore> score_suspicions(const CepContext& ctx, const PdrIndex& index,
                                           std::span<const ContactSuspicion> suspicions);

// Lower median of a non-empty sorted list.
Minute lower_median(std::span<const Minute> sorted);

struct Findings {
  std::vector<ContactSuspicion> suspicions;
  std::vector<ContactScore> scores;
};

// Re-runs find_suspicions for every u of a pair scored at or above
// class_threshold, with t_inf_min(u) = median contact of the pair's first
// qualifying window, until no new unordered pair appears. Returns only the
// additions.
Findings complete_findings(const CepContext& ctx, const PdrIndex& index, const Findings& existing,
                           int class_threshold);

// Needs Decrypt and Resolve (FULL_PROCESSING). Keeps pairs whose phones are
// both in `infected` and emits one record per contact episode: qualifying
// windows of the same pair that overlap collapse to the earliest-starting
// one. Throws kResolution for a code the registry lacks.
std::vector<ContaminationRecord> build_pccont(const Capability& capability,
                                              std::span<const ContactScore> scores,
                                              const std::map<PhoneId, Minute>& infected,
                                              const ProviderRegistry& registry);

BoundingBox region_coords(const SpaceTimeRegion& region, const ProviderRegistry& registry);

InfectionDag build_dag(std::span<const ContaminationRecord> records, Minute t_incub_min,
                       Minute t_incub_max);
// Kahn's algorithm; nullopt when the graph has a cycle.
std::optional<std::vector<PhoneId>> topological_order(const InfectionDag& dag);

// Throws kParameter for cell_size <= 0.
std::vector<HotspotCell> hotspot_map(std::span<const ContaminationRecord> records, double cell_size);

}  // namespace prilok

#endif  // PRILOK_CEP_HPP_
