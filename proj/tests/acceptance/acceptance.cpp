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


// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <bit>
#include <cstdlib>
#include <chrono>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracle/brute_force.hpp"
#include "prilok/attack_suite.hpp"
#include "prilok/cep.hpp"
#include "prilok/error.hpp"
#include "prilok/federation.hpp"
#include "prilok/ledger.hpp"
#include "prilok/runner.hpp"
#include "prilok/vault.hpp"
#include "prilok/world.hpp"

using namespace prilok;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void verdict(int n, bool ok, const std::string& what) {
  std::printf("criterion %d %s  %s\n", n, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  failures += !ok;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ScenarioConfig small(std::uint64_t seed_offset = 0) {
  ScenarioConfig c = load_config(PRILOK_SOURCE_DIR "/scenarios/small.json");
  c.seed += seed_offset;
  return c;
}

bool same(const std::vector<ContactSuspicion>& got, const std::vector<oracle::Suspicion>& want) {
  if (got.size() != want.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (got[i].u != want[i].u || got[i].pc_susp != want[i].pc_susp) return false;
    if (got[i].windows.size() != want[i].windows.size()) return false;
    for (std::size_t k = 0; k < got[i].windows.size(); ++k) {
      const ContactWindow& w = got[i].windows[k];
      std::set<std::string> cells;
      for (const BsCode& c : w.region.cells) cells.insert(c.code);
      if (oracle::Window{w.region.start, w.region.end, w.duration, w.qualifies, cells} != want[i].windows[k]) {
        return false;
      }
    }
  }
  return true;
}

std::vector<Pdr> observe_all(const World& world, const ScenarioConfig& config) {
  ObservationModel model = observation_model(config);
  std::vector<Pdr> out;
  for (Minute m = 0; m < world.duration; ++m) {
    std::vector<Pdr> batch = observe(world.registry, world.traces, m, model);
    out.insert(out.end(), batch.begin(), batch.end());
  }
  return out;
}

// A five-authority federation driven by honest quorums.
struct Rig {
  explicit Rig(std::uint64_t seed) : rng(seed), fed(config(), rng, ledger) {}
  static FederationConfig config() {
    FederationConfig c;
    c.n = 5;
    c.f = 2;
    c.q_read = 3;
    c.q_critical = 3;
    return c;
  }
  QuorumCertificate certify(OperationClass op, RequestPayload payload) {
    auto c = run_quorum(fed, 1, op, std::move(payload), 0, rng);
    if (!c) fail(ErrorCode::kInvariant, "honest quorum did not certify");
    return *c;
  }
  void alert() {
    fed.change_state(certify(OperationClass::kLockUnlock, LockUnlockPayload{SystemStateKind::kAlert}),
                     SystemStateKind::kAlert, 0);
  }
  Capability capability(OperationClass op) {
    return fed.authorize_mode(certify(op, AccessPayload{"acceptance", std::nullopt, std::nullopt}), op, 0);
  }

  crypto::Drbg rng;
  Ledger ledger;
  Federation fed;
};

// Runs kept for the criteria that look at whole pipeline outputs.
struct Runs {
  std::vector<RunResult> noise_free;
  std::vector<RunResult> noisy;
};

// ---------------------------------------------------------------------------

void oracle_equivalence() {
  auto t0 = Clock::now();
  double scan_secs = 0.0;
  int scenarios = 0, pois = 0, mismatches = 0;
  std::size_t suspicions = 0;
  bool bounds = true;
  for (std::uint64_t s = 0; s < 20; ++s) {
    ScenarioConfig cfg = small(s);
    bounds = bounds && cfg.n_phones <= 50 && cfg.duration_min == 1440;
    World world = generate_world(cfg);
    bounds = bounds && world.registry.stations().size() <= 10;
    std::vector<Pdr> records = observe_all(world, cfg);
    PdrIndex index(records);
    oracle::Records flat(records);
    Rig rig(100 + s);
    rig.alert();
    Capability blind = rig.capability(OperationClass::kBlindAnalysis);
    Capability resolve = rig.capability(OperationClass::kBlindProcessing);
    CepContext plain{&blind, nullptr, cfg.analysis.suspicion, cfg.analysis.scoring, cfg.incubation.max};
    CepContext located{&resolve, &world.registry, cfg.analysis.suspicion, cfg.analysis.scoring,
                       cfg.incubation.max};
    for (const auto& [v, inf] : world.truth.infections) {
      PhoneOfInterest poi{v, inf.t_inf_min_estimate};
      Minute start = scan_start(poi, cfg.analysis.suspicion, cfg.incubation.max);
      auto ts = Clock::now();
      auto a = find_suspicions(plain, index, poi);
      auto b = find_suspicions(located, index, poi);
      scan_secs += seconds_since(ts);
      mismatches += !same(a, oracle::find(flat, v, start, cfg.analysis.suspicion, nullptr));
      mismatches += !same(b, oracle::find(flat, v, start, cfg.analysis.suspicion, &world.registry));
      suspicions += a.size() + b.size();
      ++pois;
    }
    ++scenarios;
  }
  double secs = seconds_since(t0);
  verdict(1, mismatches == 0 && bounds && secs < 60.0,
          fmt("oracle equivalence: %d scenarios, %d phones of interest, %zu suspicions, %d mismatches; "
              "%.1f s total (< 60 s), of which find_suspicions %.1f s",
              scenarios, pois, suspicions, mismatches, secs, scan_secs));
}

void recall(const Runs& runs) {
  std::size_t nf_links = 0, nf_flagged = 0, nf_trans = 0, nf_trans_flagged = 0;
  for (const RunResult& r : runs.noise_free) {
    nf_links += r.report.planted_links;
    nf_flagged += r.report.planted_flagged;
    nf_trans += r.report.transmissions;
    nf_trans_flagged += r.report.transmissions_flagged;
  }
  std::size_t links = 0, flagged = 0;
  for (const RunResult& r : runs.noisy) {
    links += r.report.planted_links;
    flagged += r.report.planted_flagged;
  }
  double noisy_recall = links ? static_cast<double>(flagged) / static_cast<double>(links) : 0.0;
  bool ok = nf_links > 0 && nf_flagged == nf_links && links > 0 && noisy_recall >= 0.95;
  verdict(2, ok,
          fmt("ground-truth recall: noise-free planted %zu/%zu (100%% required), all transmissions %zu/%zu; "
              "class-default noise, femto venues %zu/%zu = %.1f%% (>= 95%%)",
              nf_flagged, nf_links, nf_trans_flagged, nf_trans, flagged, links, 100.0 * noisy_recall));
}

void quorum_safety() {
  crypto::Drbg rng(5);
  Ledger ledger;
  Federation fed(Rig::config(), rng, ledger);
  int accepted = 0, rejected = 0, wrong = 0;
  for (OperationClass op : {OperationClass::kLockUnlock, OperationClass::kStrictPush, OperationClass::kBlindAnalysis,
                            OperationClass::kBlindProcessing, OperationClass::kFullProcessing}) {
    for (unsigned mask = 0; mask < 32; ++mask) {
      RequestPayload payload = op == OperationClass::kLockUnlock
                                   ? RequestPayload(LockUnlockPayload{SystemStateKind::kAlert})
                                   : RequestPayload(AccessPayload{"acceptance", std::nullopt, std::nullopt});
      WorkflowRequest r = fed.authority(1).make_request(op, payload, 0, rng);
      fed.submit_request(r);
      std::optional<QuorumCertificate> cert;
      QuorumCertificate forged{r, request_hash(r), {}, 3};
      for (int id = 1; id <= 5; ++id) {
        if (!(mask & (1u << (id - 1)))) continue;
        if (auto c = fed.approve(id, r.request_id)) cert = c;
        forged.approvals.push_back({id, fed.authority(id).vote(r)->signature});
      }
      const bool enough = std::popcount(mask) >= 3;
      wrong += cert.has_value() != enough;
      wrong += fed.verify(forged) != enough;
      wrong += cert && !fed.verify(*cert);
      (cert ? accepted : rejected) += 1;
    }
  }
  std::vector<AttackOutcome> attacks = run_attack_suite(small());
  int unsafe = 0, extracted = 0;
  for (const AttackOutcome& a : attacks) {
    unsafe += !a.safe;
    extracted += a.extracted;
  }
  verdict(3, wrong == 0 && accepted == 5 * 16 && rejected == 5 * 16 && unsafe == 0 && extracted == 0,
          fmt("quorum safety: n=5 q=3 over 5 classes, %d/80 subsets of size >= 3 certified, %d/80 smaller "
              "rejected, %d discrepancies; attack suite %zu drivers, %d unsafe, %d extractions",
              accepted, rejected, wrong, attacks.size(), unsafe, extracted));
}

void vault_thresholds() {
  Rig rig(9);
  Vault vault(VaultConfig{4, 2, 3}, rig.fed, crypto::Drbg(10), Execution::kParallel);
  rig.fed.add_listener(&vault);
  rig.alert();
  Capability bp = rig.capability(OperationClass::kBlindProcessing);
  Capability full = rig.capability(OperationClass::kFullProcessing);
  Bytes secret = to_bytes(std::string(512, 's') + "351100000001");
  std::string id = vault.write(bp, secret, 0);
  const VaultObject obj = vault.objects()[0];

  // Coalitions of two clouds pooling everything they hold.
  int coalition_failed = 0, coalitions = 0;
  erasure::ReedSolomon rs(2, 4);
  for (int a = 1; a <= 4; ++a) {
    for (int b = a + 1; b <= 4; ++b) {
      ++coalitions;
      const StoredFragment& fa = vault.cloud(a).holdings().at(id);
      const StoredFragment& fb = vault.cloud(b).holdings().at(id);
      Bytes ct = rs.decode(std::vector{fa.fragment, fb.fragment}, obj.ciphertext_size);
      Bytes k = shamir::reconstruct_secret(std::vector{fa.key_share, fb.key_share});
      crypto::SymmetricKey key{};
      std::copy(k.begin(), k.end(), key.begin());
      Bytes out;
      coalition_failed += !crypto::try_open(key, ct, out);
    }
  }

  int single_ok = 0;
  for (int c = 1; c <= 4; ++c) {
    vault.cloud(c).set_fault(CloudFault::kByzantine);
    try {
      single_ok += vault.read(full, id) == secret;
    } catch (const Error&) {
    }
    vault.cloud(c).set_fault(CloudFault::kHonest);
  }

  // Every honest / crashed / Byzantine pattern. A cloud serves its fragment
  // and its share together, so 3 honest clouds give >= 2 honest fragments
  // and >= 3 honest shares; those reads must succeed, none may return wrong
  // data.
  int required = 0, succeeded = 0, wrong_data = 0;
  for (int pattern = 0; pattern < 81; ++pattern) {
    int p = pattern, honest = 0;
    for (int c = 1; c <= 4; ++c, p /= 3) {
      CloudFault f = static_cast<CloudFault>(p % 3);
      honest += f == CloudFault::kHonest;
      vault.cloud(c).set_fault(f);
    }
    bool must = honest >= 3;
    required += must;
    try {
      Bytes got = vault.read(full, id);
      wrong_data += got != secret;
      succeeded += must && got == secret;
    } catch (const Error&) {
    }
  }
  for (int c = 1; c <= 4; ++c) vault.cloud(c).set_fault(CloudFault::kHonest);
  bool ok = coalitions == 6 && coalition_failed == 6 && single_ok == 4 && succeeded == required && wrong_data == 0;
  verdict(4, ok,
          fmt("vault thresholds (n=4, k=2, key threshold 3): %d/%d two-cloud coalitions failed to decrypt, "
              "%d/4 single corruptions tolerated, %d/%d reads with enough honest pieces succeeded, "
              "%d wrong plaintexts",
              coalition_failed, coalitions, single_ok, succeeded, required, wrong_data));
}

void pruning() {
  ScenarioConfig cfg = small();
  cfg.duration_min = 3 * 1440;
  RunResult r = run_scenario(cfg);
  bool invariant = false;
  for (const InvariantCheck& c : r.report.invariants) invariant |= c.name == "pruning_bound" && c.ok;
  bool ok = invariant && r.report.prune_ticks == 3 && r.report.sets_pruned > 0 &&
            r.report.max_age_after_prune <= r.report.pdr_ttl &&
            r.report.pdr_ttl == 2 * cfg.incubation.max;
  verdict(5, ok,
          fmt("pruning bound: 3-day run, %zu daily prune ticks, %zu sets pruned, oldest record after any "
              "tick %lld min <= pdr_ttl %lld min",
              r.report.prune_ticks, r.report.sets_pruned, static_cast<long long>(r.report.max_age_after_prune),
              static_cast<long long>(r.report.pdr_ttl)));
}

void dag_validity(const Runs& runs) {
  int dags = 0, cyclic = 0;
  auto check_topo = [&](const RunResult& r) {
    ++dags;
    auto order = topological_order(r.dag);
    if (!order) {
      ++cyclic;
      return;
    }
    std::map<PhoneId, std::size_t> pos;
    for (std::size_t i = 0; i < order->size(); ++i) pos[(*order)[i]] = i;
    for (const DagEdge& e : r.dag.edges) cyclic += pos[e.from] >= pos[e.to];
  };
  for (const RunResult& r : runs.noisy) check_topo(r);

  std::size_t chains = 0, chain_edges = 0, chain_edges_found = 0, edges = 0, infeasible = 0;
  for (const RunResult& r : runs.noise_free) {
    check_topo(r);
    std::set<std::pair<PhoneId, PhoneId>> have;
    for (const DagEdge& e : r.dag.edges) have.insert({e.from, e.to});
    for (const auto& chain : r.world.truth.planted_chains) {
      if (chain.size() < 4) continue;
      ++chains;
      for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        ++chain_edges;
        chain_edges_found += have.count({chain[i], chain[i + 1]});
      }
    }
    // An edge is feasible when both ends were infected, the source strictly
    // before the target, and the source by the time of the contact.
    const auto& inf = r.world.truth.infections;
    for (const DagEdge& e : r.dag.edges) {
      ++edges;
      auto f = inf.find(e.from), t = inf.find(e.to);
      bool ok = f != inf.end() && t != inf.end() && f->second.t_infected < t->second.t_infected &&
                f->second.t_infected <= e.record.region.end;
      infeasible += !ok;
    }
  }
  bool ok = cyclic == 0 && chains > 0 && chain_edges_found == chain_edges && infeasible == 0;
  verdict(6, ok,
          fmt("DAG validity: %d DAGs topologically sorted (%d failures); noise-free planted chains %zu, "
              "chain edges present %zu/%zu; %zu/%zu edges contradict ground truth",
              dags, cyclic, chains, chain_edges_found, chain_edges, infeasible, edges));
}

void ledger_integrity(const Runs& runs, const RunResult& reference) {
  int runs_checked = 0, unverified = 0;
  for (const auto* group : {&runs.noise_free, &runs.noisy}) {
    for (const RunResult& r : *group) {
      ++runs_checked;
      unverified += !r.report.ledger_verified || !verify_ledger(r.ledger);
    }
  }
  std::ostringstream out;
  write_jsonl(out, reference.ledger);
  const std::string text = out.str();
  std::mt19937_64 gen(2026);
  std::uniform_int_distribution<std::size_t> where(0, text.size() - 1);
  std::uniform_int_distribution<int> delta(1, 255);
  int detected = 0;
  for (int i = 0; i < 100; ++i) {
    std::string t = text;
    std::size_t pos = where(gen);
    t[pos] = static_cast<char>(static_cast<unsigned char>(t[pos]) ^ delta(gen));
    std::istringstream in(t);
    auto parsed = read_jsonl(in);
    detected += !parsed || !verify_ledger(*parsed);
  }
  std::istringstream clean(text);
  auto back = read_jsonl(clean);
  bool ok = unverified == 0 && detected == 100 && back && verify_ledger(*back);
  verdict(7, ok,
          fmt("ledger integrity: %d/%d run ledgers verify; %d/100 single-byte tampers of the %zu-byte export "
              "detected",
              runs_checked - unverified, runs_checked, detected, text.size()));
}

void determinism(const RunResult& first) {
  ScenarioConfig cfg = small();
  auto t0 = Clock::now();
  RunResult again = run_scenario(cfg);
  double secs = seconds_since(t0);
  const std::string a = first.report.to_json().dump(2), b = again.report.to_json().dump(2);
  bool ok = a == b && again.report.ok() && secs < 10.0;
  verdict(8, ok,
          fmt("determinism: report.json %s across two runs (%zu bytes); small.json in %.2f s (< 10 s)",
              a == b ? "byte-identical" : "DIFFERS", a.size(), secs));
}

// Noise-free means exact measurements and exact earliest-infection instants.
ScenarioConfig noise_free(std::uint64_t seed_offset) {
  ScenarioConfig cfg = small(seed_offset);
  cfg.noise = false;
  cfg.epidemic.estimate_error = false;
  return cfg;
}

}  // namespace

// With arguments, runs only the listed criteria: `acceptance 2 6`.
int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto want = [&](int n) { return only.empty() || only.count(n) > 0; };
  try {
    if (want(1)) oracle_equivalence();

    Runs runs;
    if (want(2) || want(6) || want(7) || want(8)) {
      for (std::uint64_t s = 0; s < 10; ++s) runs.noise_free.push_back(run_scenario(noise_free(s)));
      for (std::uint64_t s = 0; s < 20; ++s) runs.noisy.push_back(run_scenario(small(s)));
    }
    if (want(2)) recall(runs);
    if (want(3)) quorum_safety();
    if (want(4)) vault_thresholds();
    if (want(5)) pruning();
    if (want(6)) dag_validity(runs);
    if (want(7)) ledger_integrity(runs, runs.noisy.front());
    if (want(8)) determinism(runs.noisy.front());
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 100;
  }
  std::printf("%d of %zu criteria failed\n", failures, only.empty() ? std::size_t{8} : only.size());
  return failures;
}
