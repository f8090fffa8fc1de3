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

#include "prilok/runner.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <sstream>

#include "prilok/edge_cloud.hpp"
#include "prilok/error.hpp"
#include "prilok/federation.hpp"
#include "prilok/report.hpp"
#include "prilok/vault.hpp"

namespace prilok {

namespace {

using Clock = std::chrono::steady_clock;

int parse_index(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    int v = std::stoi(value, &used);
    if (used != value.size() || v < 1) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::kConfiguration, "fault " + key + " needs a positive integer, got '" + value + "'");
  }
}

std::string provider_key_id(int provider) { return "provider-" + std::to_string(provider); }

// The pieces of a run that share the simulated clock.
class Pipeline {
 public:
  Pipeline(const ScenarioConfig& config, const RunOptions& options, RunResult& result)
      : config_(config), options_(options), result_(result), report_(result.report),
        rng_(config.seed), federation_(config.federation, rng_, ledger_) {}

  void run();

 private:
  void check(std::string name, bool ok, std::string detail = "") {
    report_.invariants.push_back({std::move(name), ok, std::move(detail)});
  }
  // Runs a stage; an Error becomes a failed invariant named after the stage.
  bool stage(const std::string& name, const std::function<void()>& body);
  void timed(const std::string& name, Clock::time_point start) {
    result_.timing[name + "_ms"] =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  }

  QuorumCertificate quorum(OperationClass op, RequestPayload payload, Minute now);
  void setup();
  void prune_tick(Minute now);
  void observe_and_push();
  void analyse(Minute now);
  void finish(Minute now);

  const ScenarioConfig& config_;
  const RunOptions& options_;
  RunResult& result_;
  RunReport& report_;
  crypto::Drbg rng_;
  Ledger ledger_;
  Federation federation_;
  std::vector<std::unique_ptr<EdgeCloud>> clouds_;
  std::unique_ptr<Vault> vault_;
  std::size_t certificates_ = 0;
  std::size_t reconstructions_ = 0;
  bool prune_ok_ = true;
  bool aborted_ = false;
};

bool Pipeline::stage(const std::string& name, const std::function<void()>& body) {
  if (aborted_) return false;
  try {
    body();
    return true;
  } catch (const Error& e) {
    check(name, false, std::string(to_string(e.code())) + ": " + e.what());
    aborted_ = true;
    return false;
  }
}

QuorumCertificate Pipeline::quorum(OperationClass op, RequestPayload payload, Minute now) {
  auto cert = run_quorum(federation_, 1, op, std::move(payload), now, rng_);
  if (!cert) {
    federation_.expire(now + config_.federation.vote_window_min + 1);
    fail(ErrorCode::kAuthorization, std::string(to_string(op)) + " request did not reach quorum");
  }
  ++certificates_;
  return *cert;
}

void Pipeline::setup() {
  for (int id : options_.faults.silent_authorities) {
    federation_.authority(id).set_behavior(AuthorityBehavior::kSilent);
  }
  for (int id : options_.faults.equivocating_authorities) {
    federation_.authority(id).set_behavior(AuthorityBehavior::kEquivocating);
  }
  const int providers = std::max(1, result_.world.registry.provider_count());
  for (int p = 0; p < providers; ++p) {
    federation_.create_threshold_key(provider_key_id(p));
    auto cloud = std::make_unique<EdgeCloud>(p, provider_key_id(p), federation_, config_.pdr_ttl(),
                                             rng_.fork());
    federation_.add_listener(cloud.get());
    clouds_.push_back(std::move(cloud));
  }
  vault_ = std::make_unique<Vault>(config_.vault, federation_, rng_.fork(), options_.exec);
  federation_.add_listener(vault_.get());
  for (int id : options_.faults.byzantine_clouds) vault_->cloud(id).set_fault(CloudFault::kByzantine);
  for (int id : options_.faults.crashed_clouds) vault_->cloud(id).set_fault(CloudFault::kCrashed);
}

void Pipeline::prune_tick(Minute now) {
  for (auto& c : clouds_) {
    c->prune(now);
    Minute age = c->oldest_age(now).value_or(0);
    report_.max_age_after_prune = std::max(report_.max_age_after_prune, age);
    if (age > config_.pdr_ttl()) prune_ok_ = false;
  }
  ++report_.prune_ticks;
}

void Pipeline::observe_and_push() {
  const World& world = result_.world;
  const ObservationModel model = observation_model(config_);
  const Minute alert_at = config_.effective_alert_minute();
  std::vector<ProviderPort> ports;
  for (auto& c : clouds_) ports.push_back(c->provider_port());

  for (Minute m = 0; m < world.duration; ++m) {
    if (m > 0 && m % kMinutesPerDay == 0) prune_tick(m);
    if (m == alert_at) {
      stage("alert_quorum", [&] {
        federation_.change_state(quorum(OperationClass::kLockUnlock, LockUnlockPayload{SystemStateKind::kAlert}, m),
                                 SystemStateKind::kAlert, m);
      });
    }
    std::vector<Pdr> pdrs = observe(world.registry, world.traces, m, model);
    report_.pdrs_emitted += pdrs.size();
    for (const PdrSet& set : group_into_sets(pdrs)) {
      const StationInfo& s = world.registry.station(set.bs.code);
      ports[static_cast<std::size_t>(s.provider)].push(set);
    }
  }
  if (world.duration > 0 && world.duration % kMinutesPerDay == 0) prune_tick(world.duration);
  for (auto& c : clouds_) {
    EdgeMetrics em = c->metrics();
    report_.sets_pushed += em.pushed;
    report_.sets_dropped += em.dropped;
  }
  check("pruning_bound", prune_ok_,
        "max age after prune " + std::to_string(report_.max_age_after_prune) + " <= ttl " +
            std::to_string(config_.pdr_ttl()) + " over " + std::to_string(report_.prune_ticks) +
            " ticks");

  // No plaintext phone number may appear in any stored ciphertext.
  std::set<std::string> prefixes;
  for (const MobilityTrace& t : world.traces) prefixes.insert(t.phone.nr.substr(0, std::min<std::size_t>(8, t.phone.nr.size())));
  std::size_t hits = 0;
  for (auto& c : clouds_) {
    for (const EncryptedPdrSet& e : c->storage_snapshot()) {
      std::string_view ct(reinterpret_cast<const char*>(e.ciphertext.data()), e.ciphertext.size());
      for (const std::string& p : prefixes) {
        if (ct.find(p) != std::string_view::npos) ++hits;
      }
    }
  }
  check("edge_confidentiality", hits == 0, std::to_string(hits) + " plaintext identifier hits");
}

void Pipeline::analyse(Minute now) {
  const World& world = result_.world;
  if (!federation_.alert()) {
    stage("alert_quorum", [&] {
      federation_.change_state(quorum(OperationClass::kLockUnlock, LockUnlockPayload{SystemStateKind::kAlert}, now),
                               SystemStateKind::kAlert, now);
    });
  }

  // Edge -> VPN: blind fetch over the canonical wire framing.
  std::vector<std::vector<EncryptedPdrSet>> fetched(clouds_.size());
  stage("edge_fetch", [&] {
    QuorumCertificate cert = quorum(OperationClass::kBlindAnalysis,
                                    AccessPayload{"fetch encrypted PDR sets", std::nullopt, std::nullopt}, now);
    for (std::size_t p = 0; p < clouds_.size(); ++p) {
      FetchRequest req{cert, {0, now}, {}};
      Bytes resp = clouds_[p]->handle_fetch(encode_fetch_request(req), now);
      fetched[p] = decode_fetch_response(resp).sets;
      report_.sets_fetched += fetched[p].size();
    }
  });

  // VPN -> vault under BLIND_PROCESSING.
  std::vector<std::string> object_ids;
  stage("vault_write", [&] {
    QuorumCertificate cert = quorum(OperationClass::kBlindProcessing,
                                    AccessPayload{"store encrypted PDR sets", std::nullopt, std::nullopt}, now);
    Capability cap = federation_.authorize_mode(cert, OperationClass::kBlindProcessing, now);
    for (std::size_t p = 0; p < clouds_.size(); ++p) {
      Bytes blob = encode_fetch_response({fetched[p]});
      object_ids.push_back(vault_->write(cap, blob, now, provider_key_id(static_cast<int>(p))));
      Bytes sealed = vault_->read_encrypted(cap, object_ids.back());
      const auto objs = vault_->objects();
      auto it = std::find_if(objs.begin(), objs.end(),
                             [&](const VaultObject& o) { return o.object_id == object_ids.back(); });
      if (it == objs.end() || crypto::sha256(sealed) != it->ciphertext_digest) {
        fail(ErrorCode::kIntegrity, "blind read-back does not match the stored ciphertext");
      }
    }
    report_.vault_objects = object_ids.size();
    result_.vault_inventory = vault_->inventory_json();
  });

  // FULL_PROCESSING: key release, vault read, decryption, analysis.
  std::vector<PdrSet> sets;
  std::optional<Capability> full;
  stage("full_processing", [&] {
    QuorumCertificate cert = quorum(OperationClass::kFullProcessing,
                                    AccessPayload{"contact analysis", std::nullopt, std::nullopt}, now);
    full.emplace(federation_.authorize_mode(cert, OperationClass::kFullProcessing, now));
    reconstructions_ += federation_.key_ids().size();
    const PrecisionLookup lookup = world.registry.precision_lookup();
    for (std::size_t p = 0; p < object_ids.size(); ++p) {
      Bytes blob = vault_->read(*full, object_ids[p]);
      FetchResponse stored = decode_fetch_response(blob);
      if (stored.sets != fetched[p]) fail(ErrorCode::kIntegrity, "vault returned different sets");
      const crypto::BoxSecretKey& key = full->decryption_key(provider_key_id(static_cast<int>(p)));
      for (const EncryptedPdrSet& e : stored.sets) sets.push_back(decrypt_pdr_set(e, key, lookup));
    }
  });
  check("vault_roundtrip", !aborted_, "vault read-back and decryption");
  if (aborted_) return;

  auto t0 = Clock::now();
  PdrIndex index = PdrIndex::from_sets(sets);
  sets.clear();

  CepContext ctx;
  ctx.capability = &*full;
  ctx.registry = &world.registry;
  ctx.suspicion = config_.analysis.suspicion;
  ctx.scoring = config_.analysis.scoring;
  for (const StationInfo& s : world.registry.stations()) {
    if (s.venue >= 0 && !ctx.scoring.severity_by_cell.count(s.code.code)) {
      ctx.scoring.severity_by_cell[s.code.code] = world.venues[static_cast<std::size_t>(s.venue)].severity;
    }
  }
  ctx.t_incub = config_.incubation.max;
  ctx.exec = options_.exec;

  stage("analysis", [&] {
    Findings findings;
    // Every confirmed case is a phone of interest.
    for (const auto& [v, infection] : world.truth.infections) {
      PhoneOfInterest poi{v, infection.t_inf_min_estimate};
      for (ContactSuspicion& s : find_suspicions(ctx, index, poi)) {
        if (s.pc_susp) findings.scores.push_back(score_suspicion(ctx, index, s));
        findings.suspicions.push_back(std::move(s));
      }
    }
    Findings extra = complete_findings(ctx, index, findings, config_.analysis.class_threshold);
    report_.completion_pairs = extra.suspicions.size();
    for (auto& s : extra.suspicions) findings.suspicions.push_back(std::move(s));
    for (auto& s : extra.scores) findings.scores.push_back(std::move(s));

    std::map<PhoneId, Minute> infected;
    for (const auto& [phone, inf] : world.truth.infections) infected[phone] = inf.t_inf_min_estimate;
    result_.pccont = build_pccont(*full, findings.scores, infected, world.registry);
    result_.dag = build_dag(result_.pccont, config_.incubation.min, config_.incubation.max);
    result_.hotspots = hotspot_map(result_.pccont, config_.analysis.hotspot_cell_m);
    result_.suspicions = std::move(findings.suspicions);
    result_.scores = std::move(findings.scores);
  });
  timed("analysis", t0);

  report_.suspicions = result_.suspicions.size();
  std::set<std::pair<PhoneId, PhoneId>> flagged;
  for (const ContactSuspicion& s : result_.suspicions) {
    if (!s.pc_susp) continue;
    ++report_.pc_susp;
    flagged.insert(std::minmax(s.v, s.u));
  }
  for (const ContactScore& s : result_.scores) ++report_.scores_by_class[static_cast<std::size_t>(s.score_class - 1)];
  report_.pccont_records = result_.pccont.size();
  report_.dag_nodes = result_.dag.nodes.size();
  report_.dag_edges = result_.dag.edges.size();
  report_.hotspot_cells = result_.hotspots.size();

  std::vector<Transmission> tx = world.truth.transmissions();
  std::set<std::pair<PhoneId, PhoneId>> truth_edges;
  for (const Transmission& t : tx) {
    truth_edges.insert({t.from, t.to});
    if (flagged.count(std::minmax(t.from, t.to))) ++report_.transmissions_flagged;
  }
  report_.recall = tx.empty() ? 1.0 : static_cast<double>(report_.transmissions_flagged) / static_cast<double>(tx.size());
  for (const std::vector<PhoneId>& chain : world.truth.planted_chains) {
    for (std::size_t i = 1; i < chain.size(); ++i) {
      ++report_.planted_links;
      if (flagged.count(std::minmax(chain[i - 1], chain[i]))) ++report_.planted_flagged;
    }
  }
  report_.planted_recall = report_.planted_links == 0 ? 1.0
                                                      : static_cast<double>(report_.planted_flagged) /
                                                            static_cast<double>(report_.planted_links);
  std::size_t true_edges = 0;
  for (const DagEdge& e : result_.dag.edges) true_edges += truth_edges.count({e.from, e.to});
  report_.precision = result_.dag.edges.empty()
                          ? 1.0
                          : static_cast<double>(true_edges) / static_cast<double>(result_.dag.edges.size());
  check("dag_acyclic", topological_order(result_.dag).has_value(),
        std::to_string(report_.dag_nodes) + " nodes, " + std::to_string(report_.dag_edges) + " edges");
}

void Pipeline::finish(Minute now) {
  aborted_ = false;  // returning to Passive is attempted regardless
  if (federation_.alert()) {
    stage("passive_quorum", [&] {
      federation_.change_state(quorum(OperationClass::kLockUnlock, LockUnlockPayload{SystemStateKind::kPassive}, now),
                               SystemStateKind::kPassive, now);
    });
  }
  bool passive = !federation_.alert();
  check("passive_at_end", passive, std::string(to_string(federation_.state().state)));
  std::size_t held = 0;
  for (int i = 1; i <= config_.vault.n_clouds; ++i) held += vault_->cloud(i).object_count();
  check("vault_empty_at_end", vault_->object_count() == 0 && held == 0,
        std::to_string(vault_->object_count()) + " objects, " + std::to_string(held) + " pieces held");
  bool locked = std::all_of(clouds_.begin(), clouds_.end(), [](const auto& c) { return c->locked_for_vpn(); });
  check("edge_locked_at_end", locked, locked ? "all edge clouds locked" : "an edge cloud is open");

  std::size_t state_changes = ledger_.count(LedgerKind::kStateChange);
  std::size_t certs = ledger_.count(LedgerKind::kCertificate);
  std::size_t recon = ledger_.count(LedgerKind::kKeyReconstruction);
  check("ledger_completeness", certs == certificates_ && recon == reconstructions_ && state_changes <= 2,
        std::to_string(certs) + " certificates, " + std::to_string(recon) + " key reconstructions, " +
            std::to_string(state_changes) + " state changes");

  for (auto& c : clouds_) report_.sets_pruned += c->metrics().pruned;
  result_.ledger = ledger_.entries();
  report_.ledger_entries = result_.ledger.size();
  report_.ledger_verified = verify_ledger(result_.ledger);
  check("ledger_verifies", report_.ledger_verified, std::to_string(report_.ledger_entries) + " entries");
}

void Pipeline::run() {
  auto t0 = Clock::now();
  result_.world = generate_world(config_);
  timed("generate", t0);
  const World& world = result_.world;
  report_.scenario_digest = to_hex(crypto::view(crypto::sha256(to_bytes(to_json(config_)))));
  report_.seed = config_.seed;
  report_.faults = to_string(options_.faults);
  report_.phones = world.traces.size();
  report_.stations = world.registry.stations().size();
  report_.infections = world.truth.infections.size();
  report_.transmissions = world.truth.transmissions().size();
  report_.longest_chain = world.truth.longest_chain();
  report_.pdr_ttl = config_.pdr_ttl();

  setup();
  t0 = Clock::now();
  observe_and_push();
  timed("observe_push", t0);
  t0 = Clock::now();
  analyse(world.duration);
  timed("fetch_vault_analyse", t0);
  finish(world.duration);
}

}  // namespace

FaultSpec parse_faults(const std::string& spec) {
  FaultSpec f;
  std::stringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorCode::kConfiguration, "fault '" + item + "' needs key=index");
    std::string key = item.substr(0, eq);
    int idx = parse_index(key, item.substr(eq + 1));
    if (key == "byzantine-cloud") {
      f.byzantine_clouds.push_back(idx);
    } else if (key == "crash-cloud") {
      f.crashed_clouds.push_back(idx);
    } else if (key == "silent-authority") {
      f.silent_authorities.push_back(idx);
    } else if (key == "equivocating-authority") {
      f.equivocating_authorities.push_back(idx);
    } else {
      fail(ErrorCode::kConfiguration, "unknown fault kind '" + key + "'");
    }
  }
  return f;
}

std::string to_string(const FaultSpec& f) {
  std::string s;
  auto add = [&](const char* key, const std::vector<int>& ids) {
    for (int id : ids) s += (s.empty() ? "" : ",") + std::string(key) + "=" + std::to_string(id);
  };
  add("byzantine-cloud", f.byzantine_clouds);
  add("crash-cloud", f.crashed_clouds);
  add("silent-authority", f.silent_authorities);
  add("equivocating-authority", f.equivocating_authorities);
  return s;
}

bool RunReport::ok() const {
  return ledger_verified &&
         std::all_of(invariants.begin(), invariants.end(), [](const InvariantCheck& c) { return c.ok; });
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json inv = nlohmann::json::array();
  for (const InvariantCheck& c : invariants) inv.push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
  return {
      {"scenario_digest", scenario_digest},
      {"seed", seed},
      {"faults", faults},
      {"counts",
       {{"phones", phones},
        {"stations", stations},
        {"pdrs_emitted", pdrs_emitted},
        {"sets_pushed", sets_pushed},
        {"sets_dropped", sets_dropped},
        {"sets_pruned", sets_pruned},
        {"sets_fetched", sets_fetched},
        {"vault_objects", vault_objects},
        {"suspicions", suspicions},
        {"pc_susp", pc_susp},
        {"completion_pairs", completion_pairs},
        {"scores_by_class", scores_by_class},
        {"pccont_records", pccont_records},
        {"dag_nodes", dag_nodes},
        {"dag_edges", dag_edges},
        {"hotspot_cells", hotspot_cells}}},
      {"ground_truth",
       {{"infections", infections},
        {"transmissions", transmissions},
        {"transmissions_flagged", transmissions_flagged},
        {"longest_chain", longest_chain},
        {"planted_links", planted_links},
        {"planted_flagged", planted_flagged}}},
      {"recall", recall},
      {"planted_recall", planted_recall},
      {"precision", precision},
      {"pruning", {{"pdr_ttl", pdr_ttl}, {"max_age_after_prune", max_age_after_prune}, {"ticks", prune_ticks}}},
      {"ledger", {{"entries", ledger_entries}, {"verified", ledger_verified}}},
      {"invariants", inv},
      {"ok", ok()},
  };
}

std::string RunReport::summary() const {
  std::ostringstream o;
  char buf[64];
  o << "scenario " << scenario_digest.substr(0, 16) << " seed " << seed;
  if (!faults.empty()) o << " faults " << faults;
  o << "\n";
  o << "phones " << phones << ", stations " << stations << ", PDRs " << pdrs_emitted << ", sets pushed "
    << sets_pushed << " (dropped " << sets_dropped << ", pruned " << sets_pruned << ")\n";
  o << "fetched " << sets_fetched << " sets into " << vault_objects << " vault objects\n";
  o << "suspicions " << suspicions << " (pc_susp " << pc_susp << ", from completion " << completion_pairs
    << ")\n";
  o << "score classes 1-4: " << scores_by_class[0] << " " << scores_by_class[1] << " " << scores_by_class[2]
    << " " << scores_by_class[3] << "\n";
  o << "PCcont " << pccont_records << ", DAG " << dag_nodes << " nodes / " << dag_edges << " edges, hotspot cells "
    << hotspot_cells << "\n";
  std::snprintf(buf, sizeof(buf), "%.4f", recall);
  o << "ground truth: " << infections << " infections, " << transmissions << " transmissions, longest chain "
    << longest_chain << "; recall " << buf;
  std::snprintf(buf, sizeof(buf), "%.4f", planted_recall);
  o << ", planted links " << planted_flagged << "/" << planted_links << " (" << buf << ")";
  std::snprintf(buf, sizeof(buf), "%.4f", precision);
  o << ", DAG precision " << buf << "\n";
  o << "ledger " << ledger_entries << " entries, " << (ledger_verified ? "verified" : "VERIFICATION FAILED") << "\n";
  for (const InvariantCheck& c : invariants) {
    o << (c.ok ? "  ok    " : "  FAIL  ") << c.name;
    if (!c.detail.empty()) o << ": " << c.detail;
    o << "\n";
  }
  o << (ok() ? "all invariants held\n" : "INVARIANT BREACH\n");
  return o.str();
}

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  validate(config);
  RunResult result;
  result.timing = nlohmann::json::object();
  auto t0 = Clock::now();
  Pipeline pipeline(config, options, result);
  pipeline.run();
  result.timing["total_ms"] = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return result;
}

void write_artifacts(const RunResult& result, const std::filesystem::path& out_dir, bool export_traces) {
  std::filesystem::create_directories(out_dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) fail(ErrorCode::kConfiguration, "cannot write " + (out_dir / name).string());
    f << text;
  };
  write("report.json", result.report.to_json().dump(2) + "\n");
  write("summary.txt", result.report.summary());
  {
    std::ostringstream s;
    write_jsonl(s, result.ledger);
    write("ledger.jsonl", s.str());
  }
  write("suspicions.json", suspicions_json(result.suspicions).dump(2) + "\n");
  write("scores.json", scores_json(result.scores).dump(2) + "\n");
  write("pccont.json", pccont_json(result.pccont).dump(2) + "\n");
  write("dag.json", to_json(result.dag).dump(2) + "\n");
  write("dag.dot", dag_dot(result.dag));
  write("hotspots.csv", hotspots_csv(result.hotspots));
  write("vault_inventory.json", result.vault_inventory.empty() ? "{}\n" : result.vault_inventory);
  write("timing.json", result.timing.dump(2) + "\n");
  if (export_traces) {
    std::ofstream f(out_dir / "traces.csv", std::ios::binary);
    export_traces_csv(f, result.world.traces, result.world.duration);
  }
}

}  // namespace prilok
