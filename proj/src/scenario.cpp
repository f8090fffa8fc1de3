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

#include "prilok/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "json.hpp"
#include "prilok/error.hpp"

namespace prilok {

using nlohmann::json;

std::string_view to_string(OperationClass c) {
  switch (c) {
    case OperationClass::kLockUnlock: return "LOCK_UNLOCK";
    case OperationClass::kStrictPush: return "STRICT_PUSH";
    case OperationClass::kBlindAnalysis: return "BLIND_ANALYSIS";
    case OperationClass::kBlindProcessing: return "BLIND_PROCESSING";
    case OperationClass::kFullProcessing: return "FULL_PROCESSING";
  }
  return "LOCK_UNLOCK";
}

OperationClass parse_operation_class(std::string_view name) {
  for (OperationClass c : kAllOperationClasses) {
    if (to_string(c) == name) return c;
  }
  fail(ErrorCode::kValidation, "unknown operation class '" + std::string(name) + "'");
}

std::string_view to_string(SystemStateKind s) {
  return s == SystemStateKind::kAlert ? "ALERT" : "PASSIVE";
}

int FederationConfig::quorum(OperationClass c) const {
  switch (c) {
    case OperationClass::kLockUnlock:
    case OperationClass::kFullProcessing:
      return q_critical;
    default:
      return q_read;
  }
}

Minute ScenarioConfig::pdr_ttl() const {
  return static_cast<Minute>(std::llround(pdr_ttl_factor * static_cast<double>(incubation.max)));
}

Minute ScenarioConfig::effective_alert_minute() const {
  return alert_minute < 0 ? duration_min : alert_minute;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::kConfiguration, what);
}

// Reads `obj[key]` into `out` when present; rejects keys outside `allowed`.
class Section {
 public:
  Section(const json& obj, std::string name, std::initializer_list<const char*> allowed)
      : obj_(obj), name_(std::move(name)) {
    require(obj_.is_object(), "'" + name_ + "' must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj_.items()) {
      require(ok.count(key) != 0, "unknown key '" + name_ + "." + key + "'");
    }
  }

  template <typename T>
  void read(const char* key, T& out) const {
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      fail(ErrorCode::kConfiguration, "'" + name_ + "." + key + "' has the wrong type");
    }
  }

  const json* child(const char* key) const {
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

 private:
  const json& obj_;
  std::string name_;
};

void read_per_class(const Section& parent, const char* key, const std::string& name,
                    PerClass& out) {
  if (const json* j = parent.child(key)) {
    Section s(*j, name, {"macro", "pico", "femto"});
    s.read("macro", out.macro);
    s.read("pico", out.pico);
    s.read("femto", out.femto);
  }
}

json per_class_json(const PerClass& p) {
  return json{{"macro", p.macro}, {"pico", p.pico}, {"femto", p.femto}};
}

}  // namespace

void validate(const ScenarioConfig& c) {
  require(c.n_phones >= 1, "n_phones must be >= 1");
  require(c.n_providers >= 1, "n_providers must be >= 1");
  require(c.n_venues >= 1, "n_venues must be >= 1");
  require(c.stations.macro >= 1 && c.stations.pico >= 0 && c.stations.femto >= 0,
          "station counts: at least one macro station, others >= 0");
  require(c.world_size_m > 0, "world size must be > 0");
  require(c.duration_min >= 1, "duration must be >= 1 minute");
  require(c.speed_m_per_min > 0, "speed must be > 0");
  require(c.venue_radius_m >= 0, "venue radius must be >= 0");
  for (PrecisionClass pc : {PrecisionClass::kMacro, PrecisionClass::kPico, PrecisionClass::kFemto}) {
    require(c.useful_range_m.of(pc) > 0, "useful ranges must be > 0");
    require(c.noise_sigma_m.of(pc) >= 0, "noise sigmas must be >= 0");
  }
  require(c.useful_range_m.macro > c.useful_range_m.pico &&
              c.useful_range_m.pico > c.useful_range_m.femto,
          "useful ranges must decrease MACRO > PICO > FEMTO");
  const EpidemicConfig& e = c.epidemic;
  require(e.index_cases >= 1, "index_cases must be >= 1");
  require(e.transmission_distance_m > 0, "transmission distance must be > 0");
  require(e.transmission_distance_m <= c.world_size_m,
          "transmission distance exceeds the world size");
  require(e.min_exposure_min >= 1, "min exposure must be >= 1 minute");
  require(e.planted_chain_length >= 1, "planted chain length must be >= 1");
  require(e.meeting_duration_min >= e.min_exposure_min,
          "meeting duration must cover the minimum exposure");
  require(e.transmission_probability >= 0 && e.transmission_probability <= 1,
          "transmission probability must be in [0, 1]");
  require(e.index_cases * e.planted_chain_length <= c.n_phones,
          "not enough phones for the planted chains");
  require(c.incubation.min >= 0 && c.incubation.min <= c.incubation.max,
          "incubation bounds must satisfy 0 <= min <= max");
  require(c.incubation.max >= 1, "maximum incubation must be >= 1 minute");
  require(c.pdr_ttl_factor > 0, "pdr_ttl_factor must be > 0");
  const FederationConfig& fed = c.federation;
  require(fed.f >= 0 && fed.n >= 2 * fed.f + 1, "federation needs n >= 2f + 1");
  require(fed.q_read >= fed.f + 1 && fed.q_critical >= fed.f + 1,
          "quorums must be >= f + 1");
  require(fed.q_read <= fed.n && fed.q_critical <= fed.n, "quorums must be <= n");
  require(fed.n <= 255, "at most 255 authorities");
  require(fed.vote_window_min >= 1, "vote window must be >= 1 minute");
  const VaultConfig& v = c.vault;
  require(v.k >= 1 && v.k <= v.n_clouds && v.n_clouds <= 255, "vault needs 1 <= k <= n_clouds");
  require(v.key_threshold >= 1 && v.key_threshold <= v.n_clouds,
          "key threshold must be in 1..n_clouds");
  const AnalysisConfig& a = c.analysis;
  require(a.suspicion.prox_max_m > 0, "prox_max must be > 0");
  require(a.suspicion.dur_min >= 1, "dur_min must be >= 1");
  require(a.suspicion.gap_tolerance >= 0, "gap tolerance must be >= 0");
  require(a.suspicion.lookback_fraction >= 0, "lookback fraction must be >= 0");
  require(a.class_threshold >= 1 && a.class_threshold <= 4, "class threshold must be 1..4");
  require(a.hotspot_cell_m > 0, "hotspot cell size must be > 0");
  require(a.scoring.density_saturation > 0, "density saturation must be > 0");
  for (double s : c.venue_severity) require(s >= 0 && s <= 1, "venue severity must be in [0, 1]");
  require(c.alert_minute <= c.duration_min, "alert minute beyond the scenario duration");
}

ScenarioConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kConfiguration, std::string("invalid JSON: ") + e.what());
  }
  ScenarioConfig c;
  Section top(root, "config",
              {"seed", "world", "stations", "epidemic", "incubation", "pdr_ttl_factor",
               "federation", "vault", "alert_minute", "analysis"});
  top.read("seed", c.seed);
  top.read("pdr_ttl_factor", c.pdr_ttl_factor);
  top.read("alert_minute", c.alert_minute);

  if (const json* j = top.child("world")) {
    Section s(*j, "world",
              {"n_phones", "n_providers", "n_venues", "venue_radius_m", "size_m", "duration_min",
               "speed_m_per_min", "venue_severity"});
    s.read("n_phones", c.n_phones);
    s.read("n_providers", c.n_providers);
    s.read("n_venues", c.n_venues);
    s.read("venue_radius_m", c.venue_radius_m);
    s.read("size_m", c.world_size_m);
    s.read("duration_min", c.duration_min);
    s.read("speed_m_per_min", c.speed_m_per_min);
    s.read("venue_severity", c.venue_severity);
  }
  if (const json* j = top.child("stations")) {
    Section s(*j, "stations", {"macro", "pico", "femto", "useful_range_m", "noise_sigma_m", "noise"});
    s.read("macro", c.stations.macro);
    s.read("pico", c.stations.pico);
    s.read("femto", c.stations.femto);
    s.read("noise", c.noise);
    read_per_class(s, "useful_range_m", "stations.useful_range_m", c.useful_range_m);
    read_per_class(s, "noise_sigma_m", "stations.noise_sigma_m", c.noise_sigma_m);
  }
  if (const json* j = top.child("epidemic")) {
    Section s(*j, "epidemic",
              {"index_cases", "transmission_distance_m", "min_exposure_min",
               "planted_chain_length", "meeting_duration_min", "first_meeting_min",
               "probabilistic", "transmission_probability", "estimate_error"});
    EpidemicConfig& e = c.epidemic;
    s.read("index_cases", e.index_cases);
    s.read("transmission_distance_m", e.transmission_distance_m);
    s.read("min_exposure_min", e.min_exposure_min);
    s.read("planted_chain_length", e.planted_chain_length);
    s.read("meeting_duration_min", e.meeting_duration_min);
    s.read("first_meeting_min", e.first_meeting_min);
    s.read("probabilistic", e.probabilistic);
    s.read("transmission_probability", e.transmission_probability);
    s.read("estimate_error", e.estimate_error);
  }
  if (const json* j = top.child("incubation")) {
    Section s(*j, "incubation", {"min_min", "max_min"});
    s.read("min_min", c.incubation.min);
    s.read("max_min", c.incubation.max);
  }
  if (const json* j = top.child("federation")) {
    Section s(*j, "federation", {"n", "f", "q_read", "q_critical", "vote_window_min"});
    s.read("n", c.federation.n);
    s.read("f", c.federation.f);
    s.read("q_read", c.federation.q_read);
    s.read("q_critical", c.federation.q_critical);
    s.read("vote_window_min", c.federation.vote_window_min);
  }
  if (const json* j = top.child("vault")) {
    Section s(*j, "vault", {"n_clouds", "k", "key_threshold"});
    s.read("n_clouds", c.vault.n_clouds);
    s.read("k", c.vault.k);
    s.read("key_threshold", c.vault.key_threshold);
  }
  if (const json* j = top.child("analysis")) {
    Section s(*j, "analysis",
              {"prox_max_m", "dur_min", "gap_tolerance", "lookback_fraction", "class_threshold",
               "hotspot_cell_m", "weights", "class_bounds", "precision_factor", "precision_dur",
               "density_saturation", "default_severity"});
    AnalysisConfig& a = c.analysis;
    s.read("prox_max_m", a.suspicion.prox_max_m);
    s.read("dur_min", a.suspicion.dur_min);
    s.read("gap_tolerance", a.suspicion.gap_tolerance);
    s.read("lookback_fraction", a.suspicion.lookback_fraction);
    s.read("class_threshold", a.class_threshold);
    s.read("hotspot_cell_m", a.hotspot_cell_m);
    s.read("weights", a.scoring.weights);
    s.read("class_bounds", a.scoring.class_bounds);
    s.read("precision_factor", a.scoring.precision_factor);
    s.read("precision_dur", a.scoring.precision_dur);
    s.read("density_saturation", a.scoring.density_saturation);
    s.read("default_severity", a.scoring.default_severity);
  }
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kConfiguration, "cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_json(const ScenarioConfig& c) {
  const EpidemicConfig& e = c.epidemic;
  const AnalysisConfig& a = c.analysis;
  json j{
      {"seed", c.seed},
      {"pdr_ttl_factor", c.pdr_ttl_factor},
      {"alert_minute", c.alert_minute},
      {"world",
       {{"n_phones", c.n_phones},
        {"n_providers", c.n_providers},
        {"n_venues", c.n_venues},
        {"venue_radius_m", c.venue_radius_m},
        {"size_m", c.world_size_m},
        {"duration_min", c.duration_min},
        {"speed_m_per_min", c.speed_m_per_min},
        {"venue_severity", c.venue_severity}}},
      {"stations",
       {{"macro", c.stations.macro},
        {"pico", c.stations.pico},
        {"femto", c.stations.femto},
        {"noise", c.noise},
        {"useful_range_m", per_class_json(c.useful_range_m)},
        {"noise_sigma_m", per_class_json(c.noise_sigma_m)}}},
      {"epidemic",
       {{"index_cases", e.index_cases},
        {"transmission_distance_m", e.transmission_distance_m},
        {"min_exposure_min", e.min_exposure_min},
        {"planted_chain_length", e.planted_chain_length},
        {"meeting_duration_min", e.meeting_duration_min},
        {"first_meeting_min", e.first_meeting_min},
        {"probabilistic", e.probabilistic},
        {"transmission_probability", e.transmission_probability},
        {"estimate_error", e.estimate_error}}},
      {"incubation", {{"min_min", c.incubation.min}, {"max_min", c.incubation.max}}},
      {"federation",
       {{"n", c.federation.n},
        {"f", c.federation.f},
        {"q_read", c.federation.q_read},
        {"q_critical", c.federation.q_critical},
        {"vote_window_min", c.federation.vote_window_min}}},
      {"vault",
       {{"n_clouds", c.vault.n_clouds}, {"k", c.vault.k}, {"key_threshold", c.vault.key_threshold}}},
      {"analysis",
       {{"prox_max_m", a.suspicion.prox_max_m},
        {"dur_min", a.suspicion.dur_min},
        {"gap_tolerance", a.suspicion.gap_tolerance},
        {"lookback_fraction", a.suspicion.lookback_fraction},
        {"class_threshold", a.class_threshold},
        {"hotspot_cell_m", a.hotspot_cell_m},
        {"weights", a.scoring.weights},
        {"class_bounds", a.scoring.class_bounds},
        {"precision_factor", a.scoring.precision_factor},
        {"precision_dur", a.scoring.precision_dur},
        {"density_saturation", a.scoring.density_saturation},
        {"default_severity", a.scoring.default_severity}}},
  };
  return j.dump();
}

}  // namespace prilok
