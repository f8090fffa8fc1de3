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

#include "prilok/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>

#include "prilok/crypto.hpp"
#include "prilok/error.hpp"

namespace prilok {

// ---------------------------------------------------------------------------
// Registry

void ProviderRegistry::add(StationInfo station) {
  auto pos = std::lower_bound(
      stations_.begin(), stations_.end(), station.code.code,
      [](const StationInfo& s, const std::string& code) { return s.code.code < code; });
  if (pos != stations_.end() && pos->code.code == station.code.code) {
    fail(ErrorCode::kConfiguration, "duplicate station code " + station.code.code);
  }
  stations_.insert(pos, std::move(station));
}

const StationInfo* ProviderRegistry::find(std::string_view code) const {
  auto pos = std::lower_bound(
      stations_.begin(), stations_.end(), code,
      [](const StationInfo& s, std::string_view c) { return s.code.code < c; });
  if (pos == stations_.end() || pos->code.code != code) return nullptr;
  return &*pos;
}

const StationInfo& ProviderRegistry::station(std::string_view code) const {
  const StationInfo* s = find(code);
  if (s == nullptr) fail(ErrorCode::kResolution, "no station with code " + std::string(code));
  return *s;
}

std::vector<BsCode> ProviderRegistry::provider_stations(int provider) const {
  std::vector<BsCode> out;
  for (const StationInfo& s : stations_) {
    if (s.provider == provider) out.push_back(s.code);
  }
  return out;
}

int ProviderRegistry::provider_count() const {
  int n = 0;
  for (const StationInfo& s : stations_) n = std::max(n, s.provider + 1);
  return n;
}

PrecisionLookup ProviderRegistry::precision_lookup() const {
  return [this](std::string_view code) { return station(code).code.precision; };
}

// ---------------------------------------------------------------------------
// Traces and ground truth

Point2 MobilityTrace::position_at(Minute minute) const {
  if (waypoints.empty()) return {};
  if (minute <= waypoints.front().minute) return waypoints.front().position;
  if (minute >= waypoints.back().minute) return waypoints.back().position;
  auto next = std::upper_bound(waypoints.begin(), waypoints.end(), minute,
                               [](Minute m, const Waypoint& w) { return m < w.minute; });
  auto prev = std::prev(next);
  double t = static_cast<double>(minute - prev->minute) /
             static_cast<double>(next->minute - prev->minute);
  return {prev->position.x + t * (next->position.x - prev->position.x),
          prev->position.y + t * (next->position.y - prev->position.y)};
}

int GroundTruth::longest_chain() const {
  std::map<PhoneId, int> depth;
  std::function<int(const PhoneId&)> depth_of = [&](const PhoneId& p) -> int {
    if (auto it = depth.find(p); it != depth.end()) return it->second;
    auto inf = infections.find(p);
    int d = 1;
    if (inf != infections.end() && inf->second.infected_by) d = 1 + depth_of(*inf->second.infected_by);
    depth[p] = d;
    return d;
  };
  int best = 0;
  for (const auto& [phone, inf] : infections) best = std::max(best, depth_of(phone));
  return best;
}

std::vector<Transmission> GroundTruth::transmissions() const {
  std::vector<Transmission> out;
  for (const auto& [phone, inf] : infections) {
    if (inf.infected_by) out.push_back({*inf.infected_by, phone, inf.t_contact});
  }
  return out;
}

std::vector<PhoneId> GroundTruth::index_cases() const {
  std::vector<PhoneId> out;
  for (const auto& [phone, inf] : infections) {
    if (!inf.infected_by) out.push_back(phone);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generation

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }
  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }
  Point2 in_disc(Point2 c, double radius) {
    double r = radius * std::sqrt(uniform(0.0, 1.0));
    double a = uniform(0.0, 2 * std::numbers::pi);
    return {c.x + r * std::cos(a), c.y + r * std::sin(a)};
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

Minute travel_minutes(Point2 a, Point2 b, double speed) {
  return std::max<Minute>(1, static_cast<Minute>(std::ceil(distance(a, b) / speed)));
}

struct Appointment {
  Minute arrive = 0;
  Minute leave = 0;  // last minute spent at the spot
  Point2 spot;
};

class TraceBuilder {
 public:
  TraceBuilder(Point2 start, Minute t) { waypoints_.push_back({t, start}); }

  Minute now() const { return waypoints_.back().minute; }
  Point2 here() const { return waypoints_.back().position; }

  void stay_until(Minute t) {
    if (t > now()) waypoints_.push_back({t, here()});
  }
  void move_to(Point2 p, Minute arrive) {
    if (arrive <= now()) fail(ErrorCode::kInvariant, "waypoints must strictly increase");
    waypoints_.push_back({arrive, p});
  }
  std::vector<Waypoint> take() && { return std::move(waypoints_); }

 private:
  std::vector<Waypoint> waypoints_;
};

struct Layout {
  ProviderRegistry registry;
  std::vector<Venue> venues;
  std::vector<std::vector<const StationInfo*>> femtos_at_venue;
};

Layout build_layout(const ScenarioConfig& c, Rng& rng) {
  Layout out;
  const double w = c.world_size_m;
  for (int v = 0; v < c.n_venues; ++v) {
    Venue venue;
    venue.center = {rng.uniform(0.1 * w, 0.9 * w), rng.uniform(0.1 * w, 0.9 * w)};
    venue.radius = c.venue_radius_m;
    venue.severity = v < static_cast<int>(c.venue_severity.size()) ? c.venue_severity[v] : 0.5;
    out.venues.push_back(venue);
  }

  crypto::Drbg key_rng(c.seed ^ 0x5052494c4f4b4b59ULL);
  std::vector<Bytes> provider_keys;
  for (int p = 0; p < c.n_providers; ++p) provider_keys.push_back(key_rng.bytes(32));
  std::vector<int> next_index(c.n_providers, 0);
  int global = 0;
  auto add = [&](PrecisionClass pc, Point2 centroid, int venue) {
    int provider = global++ % c.n_providers;
    StationInfo s;
    s.code = make_bs_code(provider_keys[provider], provider, next_index[provider]++, pc);
    s.centroid = centroid;
    s.useful_range = c.useful_range_m.of(pc);
    s.provider = provider;
    s.venue = venue;
    out.registry.add(s);
  };

  const int grid = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(c.stations.macro))));
  const double cell = w / grid;
  for (int i = 0; i < c.stations.macro; ++i) {
    add(PrecisionClass::kMacro, {((i % grid) + 0.5) * cell, ((i / grid) + 0.5) * cell}, -1);
  }
  for (int j = 0; j < c.stations.pico; ++j) {
    int v = c.n_venues - 1 - (j % c.n_venues);
    double a = rng.uniform(0.0, 2 * std::numbers::pi);
    Point2 centroid{out.venues[v].center.x + 5.0 * std::cos(a), out.venues[v].center.y + 5.0 * std::sin(a)};
    add(PrecisionClass::kPico, centroid, v);
  }
  for (int j = 0; j < c.stations.femto; ++j) {
    int v = j % c.n_venues;
    Point2 centroid = out.venues[v].center;
    if (j >= c.n_venues) {
      double a = rng.uniform(0.0, 2 * std::numbers::pi);
      centroid = {centroid.x + 3.0 * std::cos(a), centroid.y + 3.0 * std::sin(a)};
    }
    add(PrecisionClass::kFemto, centroid, v);
    out.venues[v].femto_covered = true;
  }
  out.femtos_at_venue.resize(c.n_venues);
  for (const StationInfo& s : out.registry.stations()) {
    if (s.code.precision == PrecisionClass::kFemto) out.femtos_at_venue[s.venue].push_back(&s);
  }
  return out;
}

std::string digits(Rng& rng, int count) {
  std::string s;
  for (int i = 0; i < count; ++i) s.push_back(static_cast<char>('0' + rng.integer(0, 9)));
  return s;
}

// Free movement between home and venues from the builder's current position
// until the end of the scenario.
void roam(TraceBuilder& b, Point2 home, const std::vector<Venue>& venues, Minute until,
          double speed, Rng& rng) {
  while (b.now() < until) {
    b.stay_until(std::min(until, b.now() + rng.integer(20, 120)));
    if (b.now() >= until) break;
    Point2 target = home;
    if (rng.bernoulli(0.7) || distance(b.here(), home) < 1e-9) {
      const Venue& v = venues[rng.integer(0, static_cast<std::int64_t>(venues.size()) - 1)];
      target = rng.in_disc(v.center, v.radius);
    }
    b.move_to(target, b.now() + travel_minutes(b.here(), target, speed));
  }
}

struct EpidemicResult {
  std::map<PhoneId, Infection> infections;
};

EpidemicResult simulate_epidemic(const ScenarioConfig& c, const std::vector<MobilityTrace>& traces,
                                 const std::vector<std::size_t>& index_cases, Rng& rng) {
  const std::size_t n = traces.size();
  const Minute latent = c.incubation.min;
  std::vector<Minute> infected_at(n, -1);
  std::vector<int> infector(n, -1);
  for (std::size_t i : index_cases) infected_at[i] = 0;
  std::vector<Minute> exposure(n * n, 0);
  std::vector<Point2> pos(n);
  for (Minute m = 0; m < c.duration_min; ++m) {
    for (std::size_t i = 0; i < n; ++i) pos[i] = traces[i].position_at(m);
    std::vector<std::pair<std::size_t, std::size_t>> newly;  // (u, v)
    for (std::size_t v = 0; v < n; ++v) {
      if (infected_at[v] < 0 || m < infected_at[v] + latent) continue;
      for (std::size_t u = 0; u < n; ++u) {
        if (u == v || infected_at[u] >= 0) continue;
        Minute& e = exposure[v * n + u];
        if (distance(pos[v], pos[u]) <= c.epidemic.transmission_distance_m) {
          ++e;
        } else {
          e = 0;
        }
        if (e == c.epidemic.min_exposure_min) {
          bool transmit = !c.epidemic.probabilistic || rng.bernoulli(c.epidemic.transmission_probability);
          if (transmit) newly.emplace_back(u, v);
        }
      }
    }
    // Lowest infector index wins when several cross the threshold together.
    for (auto [u, v] : newly) {
      if (infected_at[u] >= 0) continue;
      infected_at[u] = m;
      infector[u] = static_cast<int>(v);
    }
  }
  EpidemicResult out;
  for (std::size_t i = 0; i < n; ++i) {
    if (infected_at[i] < 0) continue;
    Infection inf;
    inf.t_infected = infected_at[i];
    inf.t_contact = infected_at[i];
    if (infector[i] >= 0) inf.infected_by = traces[infector[i]].phone;
    Minute eps = c.epidemic.estimate_error ? rng.integer(0, c.incubation.min / 2) : 0;
    inf.t_inf_min_estimate = std::max<Minute>(0, inf.t_infected - eps);
    out.infections.emplace(traces[i].phone, inf);
  }
  return out;
}

World generate_attempt(const ScenarioConfig& c, std::uint64_t seed) {
  Rng rng(seed);
  Layout layout = build_layout(c, rng);
  const double w = c.world_size_m;

  // Phones and homes, kept clear of venues so homes are private places.
  struct PhoneSetup {
    PhoneId id;
    Point2 home;
  };
  std::vector<PhoneSetup> phones;
  for (int i = 0; i < c.n_phones; ++i) {
    char nr[16];
    std::snprintf(nr, sizeof(nr), "351%09d", 100000000 + i);
    PhoneSetup p{make_phone_id(nr, "35" + digits(rng, 13)), {}};
    for (int attempt = 0; attempt < 100; ++attempt) {
      p.home = {rng.uniform(0.0, w), rng.uniform(0.0, w)};
      bool clear = std::all_of(layout.venues.begin(), layout.venues.end(), [&](const Venue& v) {
        return distance(v.center, p.home) > v.radius + 30.0;
      });
      if (clear) break;
    }
    phones.push_back(p);
  }

  // Planted chains: member i meets member i + 1 at a femto-covered venue once
  // member i has become infectious.
  std::vector<std::size_t> order(c.n_phones);
  for (int i = 0; i < c.n_phones; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng.engine());
  std::vector<int> covered;
  for (int v = 0; v < c.n_venues; ++v) {
    if (!layout.femtos_at_venue[v].empty()) covered.push_back(v);
  }
  if (covered.empty()) {
    for (int v = 0; v < c.n_venues; ++v) covered.push_back(v);
  }

  const Minute latent = c.incubation.min;
  const EpidemicConfig& e = c.epidemic;
  std::vector<std::vector<Appointment>> appointments(c.n_phones);
  std::vector<std::vector<std::size_t>> chains;
  std::vector<std::pair<Point2, int>> used_spots;  // (spot, chain)
  for (int chain = 0; chain < e.index_cases; ++chain) {
    std::vector<std::size_t> members(order.begin() + chain * e.planted_chain_length,
                                     order.begin() + (chain + 1) * e.planted_chain_length);
    chains.push_back(members);
    Minute infected = 0;
    Minute earliest = e.first_meeting_min > 0 ? e.first_meeting_min : latent;
    for (int i = 0; i + 1 < e.planted_chain_length; ++i) {
      int v = covered[rng.integer(0, static_cast<std::int64_t>(covered.size()) - 1)];
      Point2 anchor = layout.femtos_at_venue[v].empty() ? layout.venues[v].center
                                                        : layout.femtos_at_venue[v].front()->centroid;
      double spot_radius = std::min(c.venue_radius_m, 0.4 * c.useful_range_m.femto);
      Point2 spot = rng.in_disc(anchor, spot_radius);
      for (int attempt = 0; attempt < 100; ++attempt) {
        bool clear = std::all_of(used_spots.begin(), used_spots.end(), [&](const auto& u) {
          return u.second == chain || distance(u.first, spot) > 3 * e.transmission_distance_m;
        });
        if (clear) break;
        spot = rng.in_disc(anchor, spot_radius);
      }
      used_spots.emplace_back(spot, chain);

      const std::size_t a = members[i];
      const std::size_t b = members[i + 1];
      Minute ready_a = appointments[a].empty() ? 0 : appointments[a].back().leave + 1;
      Minute arrive = std::max({earliest, infected + latent,
                                ready_a + 2 * travel_minutes(phones[a].home, spot, c.speed_m_per_min) + 1,
                                travel_minutes(phones[a].home, spot, c.speed_m_per_min) + 1,
                                travel_minutes(phones[b].home, spot, c.speed_m_per_min) + 1});
      Minute leave = arrive + e.meeting_duration_min - 1;
      if (leave + 1 >= c.duration_min) {
        fail(ErrorCode::kConfiguration,
             "planted chain does not fit in the scenario duration; shorten the chain, the "
             "incubation minimum or the meetings");
      }
      appointments[a].push_back({arrive, leave, spot});
      appointments[b].push_back({arrive, leave, spot});
      infected = arrive + e.min_exposure_min - 1;
      earliest = leave + 1;
    }
  }

  std::vector<MobilityTrace> traces;
  for (int i = 0; i < c.n_phones; ++i) {
    const PhoneSetup& p = phones[i];
    TraceBuilder b(p.home, 0);
    for (const Appointment& appt : appointments[i]) {
      Minute travel = travel_minutes(p.home, appt.spot, c.speed_m_per_min);
      b.stay_until(appt.arrive - travel);
      b.move_to(appt.spot, appt.arrive);
      b.stay_until(appt.leave);
      b.move_to(p.home, appt.leave + travel);
    }
    roam(b, p.home, layout.venues, c.duration_min, c.speed_m_per_min, rng);
    traces.push_back({p.id, std::move(b).take()});
  }

  std::vector<std::size_t> index_cases;
  for (const auto& chain : chains) index_cases.push_back(chain.front());
  EpidemicResult epi = simulate_epidemic(c, traces, index_cases, rng);

  World world;
  world.registry = std::move(layout.registry);
  world.venues = std::move(layout.venues);
  world.duration = c.duration_min;
  world.truth.infections = std::move(epi.infections);
  world.truth.incubation = c.incubation;
  for (const auto& chain : chains) {
    std::vector<PhoneId> ids;
    for (std::size_t m : chain) ids.push_back(traces[m].phone);
    world.truth.planted_chains.push_back(std::move(ids));
  }
  std::sort(traces.begin(), traces.end(),
            [](const MobilityTrace& a, const MobilityTrace& b) { return a.phone < b.phone; });
  world.traces = std::move(traces);
  return world;
}

bool chains_intact(const World& w) {
  for (const auto& chain : w.truth.planted_chains) {
    for (std::size_t i = 1; i < chain.size(); ++i) {
      auto it = w.truth.infections.find(chain[i]);
      if (it == w.truth.infections.end() || it->second.infected_by != chain[i - 1]) return false;
    }
  }
  return true;
}

}  // namespace

World generate_world(const ScenarioConfig& config) {
  validate(config);
  // A stray infection can pre-empt a planted link; reseed deterministically
  // until every planted chain is realised verbatim.
  constexpr int kAttempts = 16;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    World w = generate_attempt(config, splitmix64(config.seed + static_cast<std::uint64_t>(attempt)));
    if (config.epidemic.probabilistic || chains_intact(w)) return w;
  }
  fail(ErrorCode::kConfiguration, "could not realise the planted infection chains");
}

ObservationModel observation_model(const ScenarioConfig& config) {
  return {config.noise_sigma_m, config.noise, config.seed};
}

std::vector<Pdr> observe(const ProviderRegistry& registry, std::span<const MobilityTrace> traces,
                         Minute minute, const ObservationModel& model) {
  std::vector<Pdr> out;
  for (const StationInfo& s : registry.stations()) {
    const double sigma = model.noise ? model.sigma_m.of(s.code.precision) : 0.0;
    for (const MobilityTrace& t : traces) {
      Point2 pos = t.position_at(minute);
      if (distance(pos, s.centroid) > s.useful_range) continue;
      if (sigma > 0) {
        std::uint64_t h = splitmix64(model.seed ^ splitmix64(static_cast<std::uint64_t>(minute)) ^
                                     fnv1a(s.code.code) ^ splitmix64(fnv1a(t.phone.nr)));
        std::uint64_t h2 = splitmix64(h);
        double u1 = (static_cast<double>(h >> 11) + 1.0) / 9007199254740993.0;  // (0, 1]
        double u2 = static_cast<double>(h2 >> 11) / 9007199254740992.0;          // [0, 1)
        double mag = (sigma / std::numbers::sqrt2) * std::sqrt(-2.0 * std::log(u1));
        pos.x += mag * std::cos(2 * std::numbers::pi * u2);
        pos.y += mag * std::sin(2 * std::numbers::pi * u2);
      }
      out.push_back(make_pdr(s.code, t.phone, polar_offset(s.centroid, pos), minute));
    }
  }
  return out;
}

void export_traces_csv(std::ostream& out, std::span<const MobilityTrace> traces, Minute duration) {
  out << "minute,phone_nr,x,y\n";
  char line[128];
  for (Minute m = 0; m < duration; ++m) {
    for (const MobilityTrace& t : traces) {
      Point2 p = t.position_at(m);
      std::snprintf(line, sizeof(line), "%lld,%s,%.3f,%.3f\n", static_cast<long long>(m),
                    t.phone.nr.c_str(), p.x, p.y);
      out << line;
    }
  }
}

}  // namespace prilok
