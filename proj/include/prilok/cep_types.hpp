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

// Value types produced by the event-processing pipeline.

#ifndef PRILOK_CEP_TYPES_HPP_
#define PRILOK_CEP_TYPES_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prilok/geometry.hpp"
#include "prilok/pdr.hpp"

namespace prilok {

struct PhoneOfInterest {
  PhoneId phone;
  Minute t_inf_min = 0;  // estimated earliest infection instant
};

// A time envelope over a set of paging cells.
struct SpaceTimeRegion {
  Minute start = 0;
  Minute end = 0;
  std::vector<BsCode> cells;           // sorted by code, unique, non-empty
  std::optional<BoundingBox> coords;   // only filled under full processing

  friend bool operator==(const SpaceTimeRegion&, const SpaceTimeRegion&) = default;
};

struct ProxSample {
  Minute minute = 0;
  double prox = 0.0;  // meters
  PrecisionClass precision = PrecisionClass::kMacro;
  std::string cell;   // code of the station the estimate came from

  friend bool operator==(const ProxSample&, const ProxSample&) = default;
};

// A maximal run of minutes with Prox <= prox_max, where consecutive samples
// are at most gap_tolerance missing minutes apart. duration counts only the
// qualifying minutes, never the gaps.
struct ContactWindow {
  SpaceTimeRegion region;
  std::vector<ProxSample> samples;
  Minute duration = 0;
  bool qualifies = false;  // duration >= dur_min

  friend bool operator==(const ContactWindow&, const ContactWindow&) = default;
};

struct ContactSuspicion {
  PhoneId v;  // phone of interest
  PhoneId u;
  bool pc_susp = false;
  std::vector<ContactWindow> windows;

  friend bool operator==(const ContactSuspicion&, const ContactSuspicion&) = default;
};

struct SuspicionParams {
  double prox_max_m = 2.0;
  Minute dur_min = 15;
  Minute gap_tolerance = 2;
  // Scan starts at t_inf_min - lookback_fraction * t_incub. Zero keeps the
  // strict t_pdr >= t_inf_min bound.
  double lookback_fraction = 0.0;
};

struct ScoreTerms {
  double prox_avg = 0.0;
  Minute dur_tot = 0;
  double precision_prox = 0.0;
  double precision_dur = 0.0;
  double density = 0.0;
  double severity = 0.0;

  friend bool operator==(const ScoreTerms&, const ScoreTerms&) = default;
};

// One qualifying window of a scored pair.
struct ContactEpisode {
  SpaceTimeRegion region;
  Minute median_contact = 0;  // lower median of the window's sample minutes

  friend bool operator==(const ContactEpisode&, const ContactEpisode&) = default;
};

struct ContactScore {
  PhoneId v;
  PhoneId u;
  SpaceTimeRegion region;
  double raw = 0.0;  // [0, 1]
  int score_class = 1;  // 1 low, 2 moderate, 3 high, 4 very high
  ScoreTerms terms;
  std::vector<Minute> contact_minutes;  // qualifying minutes, ascending
  std::vector<ContactEpisode> episodes;  // ascending start

  friend bool operator==(const ContactScore&, const ContactScore&) = default;
};

struct ScoringConfig {
  // proximity, duration, precision, density, severity
  std::array<double, 5> weights{0.35, 0.35, 0.10, 0.10, 0.10};
  std::array<double, 3> class_bounds{0.25, 0.50, 0.75};
  std::array<double, 3> precision_factor{0.2, 0.6, 1.0};  // MACRO, PICO, FEMTO
  double precision_dur = 0.5;
  double density_saturation = 20.0;  // phones per minute that saturate density
  double default_severity = 0.5;
  std::map<std::string, double> severity_by_cell;  // BsCode -> [0, 1]
};

struct ContaminationRecord {
  PhoneId v;
  PhoneId u;
  SpaceTimeRegion region;
  BoundingBox coords;
  Minute median_contact = 0;
  Minute t_inf_min_v = 0;
  Minute t_inf_min_u = 0;

  friend bool operator==(const ContaminationRecord&, const ContaminationRecord&) = default;
};

struct DagEdge {
  PhoneId from;
  PhoneId to;
  ContaminationRecord record;
  double weight = 0.0;  // plausibility in [0, 1]
};

struct InfectionDag {
  std::vector<PhoneId> nodes;  // sorted
  std::vector<DagEdge> edges;  // sorted by (from, to)
};

struct HotspotCell {
  std::int64_t cell_x = 0;
  std::int64_t cell_y = 0;
  int count = 0;

  friend bool operator==(const HotspotCell&, const HotspotCell&) = default;
};

}  // namespace prilok

#endif  // PRILOK_CEP_TYPES_HPP_
