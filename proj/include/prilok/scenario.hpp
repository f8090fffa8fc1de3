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

// Scenario configuration. The JSON schema is documented in docs/config.md;
// every field is optional and falls back to the defaults below.

#ifndef PRILOK_SCENARIO_HPP_
#define PRILOK_SCENARIO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "prilok/cep_types.hpp"
#include "prilok/modes.hpp"
#include "prilok/pdr.hpp"

namespace prilok {

struct PerClass {
  double macro = 0.0;
  double pico = 0.0;
  double femto = 0.0;

  double of(PrecisionClass c) const {
    switch (c) {
      case PrecisionClass::kMacro: return macro;
      case PrecisionClass::kPico: return pico;
      case PrecisionClass::kFemto: return femto;
    }
    return macro;
  }
};

struct StationCounts {
  int macro = 2;
  int pico = 1;
  int femto = 3;

  int total() const { return macro + pico + femto; }
};

struct EpidemicConfig {
  int index_cases = 1;
  double transmission_distance_m = 2.0;
  Minute min_exposure_min = 15;
  // Phones per planted chain, index case included.
  int planted_chain_length = 4;
  Minute meeting_duration_min = 30;
  Minute first_meeting_min = 0;  // 0: one latent period after the index infection
  bool probabilistic = false;
  double transmission_probability = 0.5;
  // When false the pipeline receives exact earliest-infection instants.
  bool estimate_error = true;
};

struct IncubationBounds {
  Minute min = 240;
  Minute max = 720;
};

struct FederationConfig {
  int n = 7;
  int f = 2;
  int q_read = 3;      // STRICT_PUSH, BLIND_ANALYSIS, BLIND_PROCESSING
  int q_critical = 5;  // LOCK_UNLOCK, FULL_PROCESSING
  Minute vote_window_min = 60;

  int quorum(OperationClass c) const;
};

struct VaultConfig {
  int n_clouds = 4;
  int k = 2;
  int key_threshold = 3;
};

struct AnalysisConfig {
  SuspicionParams suspicion;
  ScoringConfig scoring;
  int class_threshold = 3;
  double hotspot_cell_m = 50.0;
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  int n_phones = 50;
  int n_providers = 2;
  int n_venues = 4;
  double venue_radius_m = 8.0;
  double world_size_m = 2000.0;
  Minute duration_min = 1440;
  double speed_m_per_min = 80.0;
  StationCounts stations;
  PerClass useful_range_m{3000.0, 40.0, 10.0};
  PerClass noise_sigma_m{150.0, 10.0, 1.0};
  bool noise = true;
  EpidemicConfig epidemic;
  IncubationBounds incubation;
  double pdr_ttl_factor = 2.0;
  FederationConfig federation;
  VaultConfig vault;
  Minute alert_minute = -1;  // -1: at the end of the observation period
  std::vector<double> venue_severity;  // per venue, default 0.5
  AnalysisConfig analysis;

  Minute pdr_ttl() const;
  Minute effective_alert_minute() const;
};

// Throws kConfiguration naming the violated constraint.
void validate(const ScenarioConfig& config);

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::filesystem::path& path);
// Canonical JSON (sorted keys, no whitespace) with every field present.
std::string to_json(const ScenarioConfig& config);

}  // namespace prilok

#endif  // PRILOK_SCENARIO_HPP_
