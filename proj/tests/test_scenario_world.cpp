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


#include <cmath>
#include <set>

#include "doctest.h"
#include "prilok/error.hpp"
#include "prilok/scenario.hpp"
#include "prilok/world.hpp"

using namespace prilok;

namespace {

ScenarioConfig quiet(std::uint64_t seed) {
  ScenarioConfig c;
  c.seed = seed;
  c.noise = false;
  return c;
}

ErrorCode code_of(const std::string& json) {
  try {
    parse_config(json);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvariant;
}

}  // namespace

TEST_CASE("config defaults and overrides") {
  ScenarioConfig c = parse_config(R"({"seed": 9, "world": {"n_phones": 12}, "incubation": {"min_min": 60, "max_min": 300}})");
  CHECK(c.seed == 9);
  CHECK(c.n_phones == 12);
  CHECK(c.pdr_ttl() == 600);
  CHECK(c.effective_alert_minute() == c.duration_min);
  CHECK(parse_config(to_json(c)).seed == 9);
  CHECK(to_json(parse_config(to_json(c))) == to_json(c));
}

TEST_CASE("two weeks of incubation gives a 40320 minute retention") {
  ScenarioConfig c;
  c.incubation = {2880, 20160};
  CHECK(c.pdr_ttl() == 40320);
}

TEST_CASE("schema violations are configuration errors") {
  CHECK(code_of("{") == ErrorCode::kConfiguration);
  CHECK(code_of(R"({"bogus": 1})") == ErrorCode::kConfiguration);
  CHECK(code_of(R"({"world": {"n_phones": "many"}})") == ErrorCode::kConfiguration);
  CHECK(code_of(R"({"federation": {"n": 4, "f": 2}})") == ErrorCode::kConfiguration);
  CHECK(code_of(R"({"federation": {"q_read": 8}})") == ErrorCode::kConfiguration);
  CHECK(code_of(R"({"vault": {"k": 5}})") == ErrorCode::kConfiguration);
  CHECK(code_of(R"({"incubation": {"min_min": 800, "max_min": 700}})") == ErrorCode::kConfiguration);
  CHECK(code_of(R"({"analysis": {"class_threshold": 5}})") == ErrorCode::kConfiguration);
  CHECK(code_of(R"({"stations": {"useful_range_m": {"macro": 5, "pico": 40, "femto": 10}}})") ==
        ErrorCode::kConfiguration);
}

TEST_CASE("world generation is deterministic") {
  World a = generate_world(quiet(3));
  World b = generate_world(quiet(3));
  REQUIRE(a.traces.size() == b.traces.size());
  for (std::size_t i = 0; i < a.traces.size(); ++i) {
    CHECK(a.traces[i].phone == b.traces[i].phone);
    for (Minute m : {0, 100, 777, 1439}) {
      CHECK(a.traces[i].position_at(m) == b.traces[i].position_at(m));
    }
  }
  CHECK(a.truth.transmissions().size() == b.truth.transmissions().size());
  World c = generate_world(quiet(4));
  CHECK(c.traces[0].position_at(500) != a.traces[0].position_at(500));
}

TEST_CASE("planted chains are realised in the ground truth") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ScenarioConfig cfg = quiet(seed);
    cfg.epidemic.planted_chain_length = 5;
    World w = generate_world(cfg);
    REQUIRE(w.truth.planted_chains.size() == 1);
    const auto& chain = w.truth.planted_chains[0];
    CHECK(chain.size() == 5);
    for (std::size_t i = 1; i < chain.size(); ++i) {
      const Infection& inf = w.truth.infections.at(chain[i]);
      REQUIRE(inf.infected_by.has_value());
      CHECK(*inf.infected_by == chain[i - 1]);
      CHECK(inf.t_inf_min_estimate <= inf.t_infected);
      CHECK(inf.t_infected - inf.t_inf_min_estimate <= cfg.incubation.min / 2);
      // Transmission needs the infector past its latent period.
      const Infection& src = w.truth.infections.at(chain[i - 1]);
      CHECK(inf.t_contact >= src.t_infected + cfg.incubation.min);
    }
    CHECK(w.truth.longest_chain() >= 5);
    CHECK(w.truth.index_cases() == std::vector<PhoneId>{chain[0]});
  }
}

TEST_CASE("observations cover every phone in range, noise-free offsets are exact") {
  ScenarioConfig cfg = quiet(5);
  World w = generate_world(cfg);
  auto pdrs = observe(w.registry, w.traces, 300, observation_model(cfg));
  std::size_t expected = 0;
  for (const StationInfo& s : w.registry.stations()) {
    for (const MobilityTrace& t : w.traces) {
      if (distance(t.position_at(300), s.centroid) <= s.useful_range) ++expected;
    }
  }
  CHECK(pdrs.size() == expected);
  for (const Pdr& p : pdrs) {
    const StationInfo& s = w.registry.station(p.bs.code);
    const MobilityTrace& t = *std::find_if(w.traces.begin(), w.traces.end(),
                                           [&](const MobilityTrace& x) { return x.phone == p.phone; });
    Point2 at = resolve(s.centroid, p.prox);
    CHECK(distance(at, t.position_at(300)) < 1e-9);
  }
}

TEST_CASE("per-class noise has RMS displacement sigma") {
  ScenarioConfig cfg;
  cfg.seed = 6;
  World w = generate_world(cfg);
  ObservationModel model = observation_model(cfg);
  double sum_sq = 0;
  int n = 0;
  for (Minute m = 0; m < 400; ++m) {
    for (const Pdr& p : observe(w.registry, w.traces, m, model)) {
      if (p.bs.precision != PrecisionClass::kMacro) continue;
      const StationInfo& s = w.registry.station(p.bs.code);
      const MobilityTrace& t = *std::find_if(w.traces.begin(), w.traces.end(),
                                             [&](const MobilityTrace& x) { return x.phone == p.phone; });
      double d = distance(resolve(s.centroid, p.prox), t.position_at(m));
      sum_sq += d * d;
      ++n;
    }
  }
  REQUIRE(n > 10000);
  CHECK(std::sqrt(sum_sq / n) == doctest::Approx(cfg.noise_sigma_m.macro).epsilon(0.03));
}

TEST_CASE("stations and venues") {
  World w = generate_world(quiet(7));
  CHECK(w.registry.stations().size() == 6);
  CHECK(w.registry.provider_count() == 2);
  std::set<std::string> codes;
  for (const StationInfo& s : w.registry.stations()) codes.insert(s.code.code);
  CHECK(codes.size() == 6);
  int femto_venues = 0;
  for (const Venue& v : w.venues) femto_venues += v.femto_covered;
  CHECK(femto_venues == 3);
  CHECK_THROWS_AS(w.registry.station("0000000000000000"), Error);
}
