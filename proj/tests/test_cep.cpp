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


#include <algorithm>
#include <chrono>
#include <random>

#include "doctest.h"
#include "oracle/brute_force.hpp"
#include "prilok/cep.hpp"
#include "support.hpp"

using namespace prilok;
using testing::code_of;
using testing::phone;
using testing::station;

namespace {

struct CepRig : testing::Rig {
  CepRig() {
    to(SystemStateKind::kAlert);
    blind = std::make_unique<Capability>(capability(OperationClass::kBlindAnalysis));
    ctx.capability = blind.get();
  }
  std::unique_ptr<Capability> blind;
  CepContext ctx;
};

// v sits on the station centroid; u at `d` meters from it.
void meet(std::vector<Pdr>& out, const PhoneId& v, const PhoneId& u, Minute from, Minute to, double d,
          const BsCode& bs = station(1)) {
  for (Minute m = from; m <= to; ++m) {
    out.push_back(make_pdr(bs, v, {0.0, 0.0}, m));
    out.push_back(make_pdr(bs, u, {d, 1.0}, m));
  }
}

std::vector<oracle::Window> as_oracle(const std::vector<ContactWindow>& windows) {
  std::vector<oracle::Window> out;
  for (const ContactWindow& w : windows) {
    std::set<std::string> cells;
    for (const BsCode& c : w.region.cells) cells.insert(c.code);
    out.push_back({w.region.start, w.region.end, w.duration, w.qualifies, cells});
  }
  return out;
}

void check_against_oracle(const std::vector<ContactSuspicion>& got, const std::vector<oracle::Suspicion>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].u == want[i].u);
    CHECK(got[i].pc_susp == want[i].pc_susp);
    CHECK(as_oracle(got[i].windows) == want[i].windows);
  }
}

}  // namespace

TEST_CASE("the scan matches the brute-force oracle on generated worlds") {
  for (std::uint64_t seed : {3u, 4u}) {
    for (bool noise : {false, true}) {
      ScenarioConfig cfg = load_config(PRILOK_SOURCE_DIR "/scenarios/small.json");
      cfg.seed = seed;
      cfg.noise = noise;
      World world = generate_world(cfg);
      std::vector<Pdr> records = testing::observe_all(world, cfg);
      PdrIndex index(records);
      CepRig rig;
      Capability resolve = rig.capability(OperationClass::kBlindProcessing);
      int checked = 0;
      for (const auto& [v, inf] : world.truth.infections) {
        if (checked++ == 6) break;
        PhoneOfInterest poi{v, inf.t_inf_min_estimate};
        auto want = oracle::find(records, v, poi.t_inf_min, rig.ctx.suspicion, nullptr);
        rig.ctx.exec = Execution::kSerial;
        check_against_oracle(find_suspicions(rig.ctx, index, poi), want);
        rig.ctx.exec = Execution::kParallel;
        check_against_oracle(find_suspicions(rig.ctx, index, poi), want);

        CepContext with_registry = rig.ctx;
        with_registry.capability = &resolve;
        with_registry.registry = &world.registry;
        check_against_oracle(find_suspicions(with_registry, index, poi),
                             oracle::find(records, v, poi.t_inf_min, rig.ctx.suspicion, &world.registry));
      }
    }
  }
}

TEST_CASE("the registry is ignored without the Resolve right") {
  std::vector<Pdr> records;
  // Same place, different providers' stations: no shared cell.
  for (Minute m = 0; m < 20; ++m) {
    records.push_back(make_pdr(station(1), phone(1), {0.0, 0.0}, m));
    records.push_back(make_pdr(station(2), phone(2), {0.0, 0.0}, m));
  }
  ProviderRegistry registry;
  registry.add({station(1), {0, 0}, 10, 0, 0});
  registry.add({station(2), {0, 0}, 10, 1, 0});
  PdrIndex index(records);
  CepRig rig;
  rig.ctx.registry = &registry;
  CHECK(find_suspicions(rig.ctx, index, {phone(1), 0}).empty());
  Capability resolve = rig.capability(OperationClass::kBlindProcessing);
  rig.ctx.capability = &resolve;
  auto found = find_suspicions(rig.ctx, index, {phone(1), 0});
  REQUIRE(found.size() == 1);
  CHECK(found[0].pc_susp);
  CHECK(found[0].windows[0].samples[0].precision == PrecisionClass::kFemto);
}

TEST_CASE("suspicion needs dur_min minutes within prox_max") {
  CepRig rig;
  SUBCASE("exactly at the bounds") {
    std::vector<Pdr> r;
    meet(r, phone(1), phone(2), 100, 114, 2.0);  // 15 minutes at 2.0 m
    auto s = find_suspicions(rig.ctx, PdrIndex(r), {phone(1), 0});
    REQUIRE(s.size() == 1);
    CHECK(s[0].pc_susp);
    CHECK(s[0].windows[0].duration == 15);
    CHECK(s[0].windows[0].region.start == 100);
    CHECK(s[0].windows[0].region.end == 114);
  }
  SUBCASE("one minute short") {
    std::vector<Pdr> r;
    meet(r, phone(1), phone(2), 100, 113, 2.0);
    auto s = find_suspicions(rig.ctx, PdrIndex(r), {phone(1), 0});
    REQUIRE(s.size() == 1);
    CHECK_FALSE(s[0].pc_susp);
  }
  SUBCASE("just too far") {
    std::vector<Pdr> r;
    meet(r, phone(1), phone(2), 100, 200, 2.001);
    CHECK(find_suspicions(rig.ctx, PdrIndex(r), {phone(1), 0}).empty());
  }
  SUBCASE("gaps up to the tolerance join windows without counting") {
    std::vector<Pdr> r;
    meet(r, phone(1), phone(2), 100, 106, 1.0);
    meet(r, phone(1), phone(2), 109, 116, 1.0);  // 107 and 108 missing
    auto s = find_suspicions(rig.ctx, PdrIndex(r), {phone(1), 0});
    REQUIRE(s.size() == 1);
    REQUIRE(s[0].windows.size() == 1);
    CHECK(s[0].windows[0].duration == 15);
    CHECK(s[0].pc_susp);
  }
  SUBCASE("a longer gap splits") {
    std::vector<Pdr> r;
    meet(r, phone(1), phone(2), 100, 106, 1.0);
    meet(r, phone(1), phone(2), 110, 117, 1.0);  // three minutes missing
    auto s = find_suspicions(rig.ctx, PdrIndex(r), {phone(1), 0});
    REQUIRE(s.size() == 1);
    CHECK(s[0].windows.size() == 2);
    CHECK_FALSE(s[0].pc_susp);
  }
  SUBCASE("far minutes inside a run break it") {
    std::vector<Pdr> r;
    meet(r, phone(1), phone(2), 100, 107, 1.0);
    meet(r, phone(1), phone(2), 108, 110, 5.0);
    meet(r, phone(1), phone(2), 111, 118, 1.0);
    auto s = find_suspicions(rig.ctx, PdrIndex(r), {phone(1), 0});
    REQUIRE(s.size() == 1);
    CHECK(s[0].windows.size() == 2);
  }
}

TEST_CASE("contacts before the earliest infection instant are ignored") {
  CepRig rig;
  std::vector<Pdr> r;
  meet(r, phone(1), phone(2), 100, 140, 0.5);
  meet(r, phone(1), phone(3), 300, 340, 0.5);
  PdrIndex index(r);
  auto s = find_suspicions(rig.ctx, index, {phone(1), 200});
  REQUIRE(s.size() == 1);
  CHECK(s[0].u == phone(3));
  s = find_suspicions(rig.ctx, index, {phone(1), 130});
  REQUIRE(s.size() == 2);
  CHECK(s[0].windows[0].region.start == 130);
  CHECK_FALSE(s[0].pc_susp);
  CHECK(code_of([&] { find_suspicions(rig.ctx, index, {phone(1), -1}); }) == ErrorCode::kValidation);
  CHECK(find_suspicions(rig.ctx, index, {phone(9), 0}).empty());

  rig.ctx.suspicion.lookback_fraction = 0.5;
  rig.ctx.t_incub = 200;
  s = find_suspicions(rig.ctx, index, {phone(1), 200});  // scan from 100
  CHECK(s.size() == 2);
}

TEST_CASE("the CEP needs an active read capability") {
  testing::Rig rig;
  std::vector<Pdr> r;
  meet(r, phone(1), phone(2), 0, 20, 0.5);
  PdrIndex index(r);
  CepContext ctx;
  CHECK(code_of([&] { find_suspicions(ctx, index, {phone(1), 0}); }) == ErrorCode::kAuthorization);
  Capability push = rig.capability(OperationClass::kStrictPush);
  ctx.capability = &push;
  CHECK(code_of([&] { find_suspicions(ctx, index, {phone(1), 0}); }) == ErrorCode::kAuthorization);
  rig.to(SystemStateKind::kAlert);
  Capability blind = rig.capability(OperationClass::kBlindAnalysis);
  ctx.capability = &blind;
  CHECK(find_suspicions(ctx, index, {phone(1), 0}).size() == 1);
  rig.to(SystemStateKind::kPassive, 1);
  CHECK(code_of([&] { find_suspicions(ctx, index, {phone(1), 0}); }) == ErrorCode::kLocked);
}

TEST_CASE("score classes and worked examples") {
  ScoringConfig cfg;
  SuspicionParams params;
  CHECK(score_class(0.0, cfg) == 1);
  CHECK(score_class(0.2499, cfg) == 1);
  CHECK(score_class(0.25, cfg) == 2);
  CHECK(score_class(0.5, cfg) == 3);
  CHECK(score_class(0.75, cfg) == 4);
  CHECK(score_class(1.0, cfg) == 4);

  ScoreTerms best{0.0, 60, 1.0, 0.5, 1.0, 1.0};
  CHECK(raw_score(best, params, cfg) == doctest::Approx(0.95));
  ScoreTerms edge{2.0, 15, 0.2, 0.5, 0.0, 0.0};
  CHECK(raw_score(edge, params, cfg) == doctest::Approx(0.35 * 0.25 + 0.1 * 0.1));
  ScoreTerms over{0.0, 600, 1.0, 1.0, 5.0, 5.0};
  CHECK(raw_score(over, params, cfg) == doctest::Approx(1.0));
}

TEST_CASE("raw score is monotone in proximity and duration") {
  ScoringConfig cfg;
  SuspicionParams params;
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    ScoreTerms t{2.0 * u01(gen), static_cast<Minute>(15 + 100 * u01(gen)), u01(gen), 0.5, u01(gen), u01(gen)};
    double base = raw_score(t, params, cfg);
    CHECK(base >= 0.0);
    CHECK(base <= 1.0);
    ScoreTerms closer = t;
    closer.prox_avg *= u01(gen);
    CHECK(raw_score(closer, params, cfg) >= base);
    ScoreTerms longer = t;
    longer.dur_tot += static_cast<Minute>(30 * u01(gen));
    CHECK(raw_score(longer, params, cfg) >= base);
  }
}

TEST_CASE("scoring a suspicion") {
  CepRig rig;
  rig.ctx.scoring.severity_by_cell[station(1).code] = 0.9;
  std::vector<Pdr> r;
  meet(r, phone(1), phone(2), 100, 159, 0.0);  // 60 minutes, same spot
  for (Minute m = 100; m < 160; ++m) r.push_back(make_pdr(station(1), phone(3), {8.0, 2.0}, m));
  PdrIndex index(r);
  auto s = find_suspicions(rig.ctx, index, {phone(1), 0});
  REQUIRE(s.size() == 1);  // phone 3 is 8 m away
  ContactScore score = score_suspicion(rig.ctx, index, s[0]);
  CHECK(score.terms.prox_avg == doctest::Approx(0.0));
  CHECK(score.terms.dur_tot == 60);
  CHECK(score.terms.precision_prox == doctest::Approx(1.0));
  CHECK(score.terms.density == doctest::Approx(3.0 / 20.0));
  CHECK(score.terms.severity == doctest::Approx(0.9));
  CHECK(score.raw == doctest::Approx(0.35 + 0.35 + 0.05 + 0.015 + 0.09));
  CHECK(score.score_class == 4);
  CHECK(score.contact_minutes.size() == 60);
  REQUIRE(score.episodes.size() == 1);
  CHECK(score.episodes[0].median_contact == 129);
  CHECK(score.episodes[0].region.start == 100);
  CHECK(score.region.cells == std::vector<BsCode>{station(1)});

  ContactSuspicion weak = s[0];
  weak.pc_susp = false;
  CHECK(code_of([&] { score_suspicion(rig.ctx, index, weak); }) == ErrorCode::kNoEvidence);
}

TEST_CASE("lower median") {
  std::vector<Minute> odd{10, 11, 12, 13, 14}, even{10, 11, 12, 13}, one{7};
  CHECK(lower_median(odd) == 12);
  CHECK(lower_median(even) == 11);
  CHECK(lower_median(one) == 7);
  CHECK(code_of([] { lower_median({}); }) == ErrorCode::kNoEvidence);
}

TEST_CASE("completion follows high-scoring contacts and is idempotent") {
  CepRig rig;
  std::vector<Pdr> r;
  meet(r, phone(1), phone(2), 100, 159, 0.0);
  meet(r, phone(2), phone(3), 700, 759, 0.0, station(2));
  meet(r, phone(3), phone(4), 50, 109, 0.0, station(3));  // before phone 3's contact
  PdrIndex index(r);
  Findings first;
  first.suspicions = find_suspicions(rig.ctx, index, {phone(1), 0});
  first.scores = score_suspicions(rig.ctx, index, first.suspicions);
  Findings added = complete_findings(rig.ctx, index, first, 3);
  REQUIRE(added.scores.size() == 1);
  CHECK(added.scores[0].v == phone(2));
  CHECK(added.scores[0].u == phone(3));

  Findings all = first;
  all.suspicions.insert(all.suspicions.end(), added.suspicions.begin(), added.suspicions.end());
  all.scores.insert(all.scores.end(), added.scores.begin(), added.scores.end());
  Findings again = complete_findings(rig.ctx, index, all, 3);
  CHECK(again.scores.empty());
  CHECK(again.suspicions.empty());
  CHECK(complete_findings(rig.ctx, index, first, 5).scores.empty());
}

TEST_CASE("contamination records need full processing") {
  testing::Rig rig;
  rig.to(SystemStateKind::kAlert);
  ProviderRegistry registry;
  registry.add({station(1), {100, 200}, 10, 0, 0});
  std::vector<Pdr> r;
  meet(r, phone(1), phone(2), 100, 159, 0.0);
  for (Minute m = 100; m < 160; ++m) r.push_back(make_pdr(station(1), phone(3), {0.5, 0.0}, m));
  PdrIndex index(r);
  Capability blind = rig.capability(OperationClass::kBlindAnalysis);
  CepContext ctx;
  ctx.capability = &blind;
  auto scores = score_suspicions(ctx, index, find_suspicions(ctx, index, {phone(1), 0}));
  REQUIRE(scores.size() == 2);
  std::map<PhoneId, Minute> infected{{phone(1), 0}, {phone(2), 400}};
  CHECK(code_of([&] { build_pccont(blind, scores, infected, registry); }) == ErrorCode::kAuthorization);
  Capability full = rig.capability(OperationClass::kFullProcessing);
  auto pc = build_pccont(full, scores, infected, registry);
  REQUIRE(pc.size() == 1);
  CHECK(pc[0].u == phone(2));
  CHECK(pc[0].median_contact == 129);
  CHECK(pc[0].coords.min == Point2{90, 190});
  CHECK(pc[0].coords.max == Point2{110, 210});
  CHECK(pc[0].region.coords == pc[0].coords);
  CHECK(pc[0].t_inf_min_u == 400);
  CHECK(code_of([&] { build_pccont(full, scores, infected, ProviderRegistry{}); }) == ErrorCode::kResolution);
}

TEST_CASE("one contamination record per contact episode") {
  testing::Rig rig;
  rig.to(SystemStateKind::kAlert);
  ProviderRegistry registry;
  registry.add({station(1), {0, 0}, 10, 0, 0});
  std::vector<Pdr> r;
  meet(r, phone(1), phone(2), 100, 129, 0.0);
  meet(r, phone(1), phone(2), 900, 929, 0.0);
  PdrIndex index(r);
  Capability full = rig.capability(OperationClass::kFullProcessing);
  CepContext ctx;
  ctx.capability = &full;
  std::vector<ContactScore> scores;
  for (const PhoneOfInterest& poi : {PhoneOfInterest{phone(2), 110}, PhoneOfInterest{phone(1), 0}}) {
    auto found = score_suspicions(ctx, index, find_suspicions(ctx, index, poi));
    scores.insert(scores.end(), found.begin(), found.end());
  }
  REQUIRE(scores.size() == 2);
  CHECK(scores[0].episodes.size() == 2);
  CHECK(scores[0].episodes[0].median_contact == 119);  // 110..129 seen from phone 2

  std::map<PhoneId, Minute> infected{{phone(1), 0}, {phone(2), 360}};
  auto pc = build_pccont(full, scores, infected, registry);
  REQUIRE(pc.size() == 2);
  CHECK(pc[0].region.start == 100);  // the fuller view of the first meeting
  CHECK(pc[0].median_contact == 114);
  CHECK(pc[0].v == phone(1));
  CHECK(pc[1].region.start == 900);
  CHECK(pc[1].median_contact == 914);

  InfectionDag dag = build_dag(pc, 240, 720);
  REQUIRE(dag.edges.size() == 1);
  CHECK(dag.edges[0].from == phone(1));
  CHECK(dag.edges[0].record.median_contact == 114);
  CHECK(dag.edges[0].weight == doctest::Approx(1.0 - 246.0 / 720.0));
}

namespace {

ContaminationRecord record(int v, int u, Minute tv, Minute tu, Minute median, Point2 at = {0, 0}) {
  ContaminationRecord r;
  r.v = phone(v);
  r.u = phone(u);
  r.t_inf_min_v = tv;
  r.t_inf_min_u = tu;
  r.median_contact = median;
  r.coords = {at, at};
  return r;
}

}  // namespace

TEST_CASE("DAG edges follow infection order") {
  std::vector<ContaminationRecord> rs{record(1, 2, 0, 300, 100)};
  InfectionDag dag = build_dag(rs, 240, 720);
  REQUIRE(dag.edges.size() == 1);
  CHECK(dag.edges[0].from == phone(1));
  CHECK(dag.edges[0].to == phone(2));
  CHECK(dag.edges[0].weight == doctest::Approx(1.0 - 200.0 / 720.0));

  // The record direction does not matter.
  dag = build_dag(std::vector{record(2, 1, 300, 0, 100)}, 240, 720);
  REQUIRE(dag.edges.size() == 1);
  CHECK(dag.edges[0].from == phone(1));

  CHECK(build_dag(std::vector{record(1, 2, 0, 200, 100)}, 240, 720).edges.empty());   // too soon
  CHECK(build_dag(std::vector{record(1, 2, 0, 1000, 100)}, 240, 720).edges.empty());  // too late
  CHECK(build_dag(std::vector{record(1, 2, 500, 800, 100)}, 240, 720).edges.empty()); // not yet infected
  CHECK(build_dag(std::vector{record(1, 2, 0, 300, 100)}, 240, 720).nodes.size() == 2);
  CHECK(code_of([] { build_dag({}, 10, 5); }) == ErrorCode::kParameter);

  auto tie = build_dag(std::vector{record(2, 1, 50, 50, 60)}, 0, 720);
  REQUIRE(tie.edges.size() == 1);
  CHECK(tie.edges[0].from == phone(1));
}

TEST_CASE("DAGs are acyclic for arbitrary records") {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<int> who(1, 12);
  std::uniform_int_distribution<Minute> when(0, 3000);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<int, Minute> t;
    for (int i = 1; i <= 12; ++i) t[i] = when(gen) % 4 == 0 ? 100 : when(gen);
    std::vector<ContaminationRecord> rs;
    for (int k = 0; k < 40; ++k) {
      int a = who(gen), b = who(gen);
      rs.push_back(record(a, b, t[a], t[b], when(gen)));
    }
    for (Minute min : {Minute{0}, Minute{240}}) {
      InfectionDag dag = build_dag(rs, min, 720);
      auto order = topological_order(dag);
      REQUIRE(order.has_value());
      std::map<PhoneId, std::size_t> pos;
      for (std::size_t i = 0; i < order->size(); ++i) pos[(*order)[i]] = i;
      for (const DagEdge& e : dag.edges) CHECK(pos[e.from] < pos[e.to]);
    }
  }
}

TEST_CASE("topological order reports cycles") {
  InfectionDag dag;
  dag.nodes = {phone(1), phone(2)};
  dag.edges.push_back({phone(1), phone(2), {}, 1.0});
  dag.edges.push_back({phone(2), phone(1), {}, 1.0});
  CHECK_FALSE(topological_order(dag).has_value());
}

TEST_CASE("hotspot map") {
  std::vector<ContaminationRecord> rs{record(1, 2, 0, 0, 0, {10, 10}), record(1, 3, 0, 0, 0, {20, 20}),
                                      record(2, 3, 0, 0, 0, {60, 10}), record(3, 4, 0, 0, 0, {-1, 0})};
  auto map = hotspot_map(rs, 50);
  REQUIRE(map.size() == 3);
  CHECK(map[0] == HotspotCell{0, 0, 2});
  CHECK(map[1] == HotspotCell{-1, 0, 1});
  CHECK(map[2] == HotspotCell{1, 0, 1});
  CHECK(code_of([&] { hotspot_map(rs, 0); }) == ErrorCode::kParameter);
  CHECK(hotspot_map({}, 10).empty());
}
