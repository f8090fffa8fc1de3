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

// Deterministic synthetic world: station layout, phone mobility, a planted
// epidemic with exact ground truth, and the measurement process that turns
// positions into proximity detail records.

#ifndef PRILOK_WORLD_HPP_
#define PRILOK_WORLD_HPP_

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prilok/geometry.hpp"
#include "prilok/pdr.hpp"
#include "prilok/scenario.hpp"

namespace prilok {

struct StationInfo {
  BsCode code;
  Point2 centroid;
  double useful_range = 0.0;
  int provider = 0;
  int venue = -1;  // venue index for PICO/FEMTO cells placed at a venue
};

// The only holder of the code -> coordinate mapping.
class ProviderRegistry {
 public:
  void add(StationInfo station);

  // Throws kResolution for an unknown code.
  const StationInfo& station(std::string_view code) const;
  const StationInfo* find(std::string_view code) const;
  // Sorted by code.
  const std::vector<StationInfo>& stations() const { return stations_; }
  std::vector<BsCode> provider_stations(int provider) const;
  int provider_count() const;
  PrecisionLookup precision_lookup() const;

 private:
  std::vector<StationInfo> stations_;
};

struct Waypoint {
  Minute minute = 0;
  Point2 position;
};

struct MobilityTrace {
  PhoneId phone;
  std::vector<Waypoint> waypoints;  // strictly increasing minutes

  // Linear interpolation; clamps outside the covered span.
  Point2 position_at(Minute minute) const;
};

struct Infection {
  Minute t_infected = 0;
  std::optional<PhoneId> infected_by;
  Minute t_contact = 0;
  // What the health service hands to the pipeline: t_infected minus an
  // estimation error in [0, t_incub_min / 2].
  Minute t_inf_min_estimate = 0;
};

struct Transmission {
  PhoneId from;
  PhoneId to;
  Minute t_contact = 0;
};

struct GroundTruth {
  std::map<PhoneId, Infection> infections;
  IncubationBounds incubation;
  std::vector<std::vector<PhoneId>> planted_chains;

  // Number of phones on the longest infected_by path.
  int longest_chain() const;
  std::vector<Transmission> transmissions() const;
  std::vector<PhoneId> index_cases() const;
};

struct Venue {
  Point2 center;
  double radius = 0.0;
  double severity = 0.5;
  bool femto_covered = false;
};

struct World {
  ProviderRegistry registry;
  std::vector<MobilityTrace> traces;  // sorted by phone
  GroundTruth truth;
  std::vector<Venue> venues;
  Minute duration = 0;
};

// Pure function of the config. Throws kConfiguration on infeasible epidemic
// parameters (transmission distance beyond the world, chains that cannot fit
// in the scenario duration).
World generate_world(const ScenarioConfig& config);

struct ObservationModel {
  PerClass sigma_m;
  bool noise = true;
  std::uint64_t seed = 0;
};

ObservationModel observation_model(const ScenarioConfig& config);

// One record per (station, phone) with the phone inside the station's useful
// range. Measurement noise is a 2D isotropic Gaussian displacement whose RMS
// magnitude is sigma(class); it is a pure function of (seed, minute, station,
// phone), so the result does not depend on call order.
std::vector<Pdr> observe(const ProviderRegistry& registry, std::span<const MobilityTrace> traces,
                         Minute minute, const ObservationModel& model);

// minute,phone_nr,x,y for every phone and minute in [0, duration).
void export_traces_csv(std::ostream& out, std::span<const MobilityTrace> traces, Minute duration);

}  // namespace prilok

#endif  // PRILOK_WORLD_HPP_
