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


#include "prilok/attack_suite.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>

#include "prilok/cross_border.hpp"
#include "prilok/edge_cloud.hpp"
#include "prilok/erasure.hpp"
#include "prilok/error.hpp"
#include "prilok/federation.hpp"
#include "prilok/ledger.hpp"
#include "prilok/vault.hpp"
#include "prilok/world.hpp"

namespace prilok {

namespace {

std::optional<ErrorCode> rejection(const std::function<void()>& attempt) {
  try {
    attempt();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::string describe(const std::optional<ErrorCode>& code) {
  return code ? "rejected with " + std::string(to_string(*code)) : "accepted";
}

bool is_one_of(const std::optional<ErrorCode>& code, std::initializer_list<ErrorCode> allowed) {
  return code && std::find(allowed.begin(), allowed.end(), *code) != allowed.end();
}

// A fresh deployment: federation, one provider's edge cloud holding an hour of
// encrypted PDR sets, and the core vault.
struct Deployment {
  explicit Deployment(const ScenarioConfig& cfg, std::uint64_t salt)
      : config(cfg), rng(cfg.seed * 0x9e3779b97f4a7c15ULL + salt), federation(cfg.federation, rng, ledger) {
    federation.create_threshold_key("provider-0");
    federation.create_threshold_key(kCrossBorderKeyId);
    edge = std::make_unique<EdgeCloud>(0, "provider-0", federation, cfg.pdr_ttl(), rng.fork());
    vault = std::make_unique<Vault>(cfg.vault, federation, rng.fork(), Execution::kSerial);
    federation.add_listener(edge.get());
    federation.add_listener(vault.get());
    world = generate_world(cfg);
    ObservationModel model = observation_model(cfg);
    for (Minute m = 0; m < std::min<Minute>(60, world.duration); ++m) {
      for (PdrSet& s : group_into_sets(observe(world.registry, world.traces, m, model))) {
        if (world.registry.station(s.bs.code).provider != 0) continue;
        if (first_set.records.empty()) first_set = s;
        edge->push(s);
      }
    }
  }

  std::optional<QuorumCertificate> certify(OperationClass op, RequestPayload payload) {
    return run_quorum(federation, 1, op, std::move(payload), now, rng);
  }
  QuorumCertificate must_certify(OperationClass op, RequestPayload payload = AccessPayload{"attack suite", {}, {}}) {
    auto c = certify(op, std::move(payload));
    if (!c) fail(ErrorCode::kInvariant, "honest quorum did not certify");
    return *c;
  }
  void set_state(SystemStateKind s) {
    federation.change_state(must_certify(OperationClass::kLockUnlock, LockUnlockPayload{s}), s, now);
  }
  Capability capability(OperationClass op) { return federation.authorize_mode(must_certify(op), op, now); }

  ScenarioConfig config;
  crypto::Drbg rng;
  Ledger ledger;
  Federation federation;
  std::unique_ptr<EdgeCloud> edge;
  std::unique_ptr<Vault> vault;
  World world;
  PdrSet first_set;
  Minute now = 60;
};

Bytes secret_payload(const Deployment& d) {
  Bytes b = serialize_pdr_set(d.first_set);
  return b;
}

AttackOutcome provider_forged_certificate(const ScenarioConfig& cfg) {
  Deployment d(cfg, 1);
  d.set_state(SystemStateKind::kAlert);
  // The provider signs a request and every approval with keys of its own.
  crypto::SigningKeyPair own = crypto::signing_keypair(d.rng);
  QuorumCertificate forged;
  forged.request.request_id = to_hex(d.rng.bytes(16));
  forged.request.op = OperationClass::kBlindAnalysis;
  forged.request.payload = AccessPayload{"provider read", {}, {}};
  forged.request.requester = 1;
  forged.request.submitted_at = d.now;
  forged.request.signature = crypto::sign(own, request_body(forged.request));
  forged.request_hash = request_hash(forged.request);
  forged.required_q = cfg.federation.quorum(OperationClass::kBlindAnalysis);
  for (int id = 1; id <= forged.required_q; ++id) {
    forged.approvals.push_back({id, crypto::sign(own, approval_message(forged.request_id(), forged.request_hash))});
  }
  std::size_t before = d.ledger.count(LedgerKind::kAccessDenied);
  auto code = rejection([&] { d.edge->vpn_fetch(forged, {0, d.now}, d.now); });
  bool logged = d.ledger.count(LedgerKind::kAccessDenied) > before;
  return {"provider_forged_certificate", "provider fetches edge data with self-signed approvals",
          is_one_of(code, {ErrorCode::kAuthorization}) && logged, !code,
          describe(code) + (logged ? ", access denial logged" : ", no denial logged")};
}

AttackOutcome sub_quorum_fetch(const ScenarioConfig& cfg) {
  Deployment d(cfg, 2);
  d.set_state(SystemStateKind::kAlert);
  const int q = cfg.federation.quorum(OperationClass::kBlindAnalysis);
  WorkflowRequest r =
      d.federation.authority(1).make_request(OperationClass::kBlindAnalysis, AccessPayload{"fetch", {}, {}}, d.now, d.rng);
  d.federation.submit_request(r);
  bool issued = false;
  QuorumCertificate partial{r, request_hash(r), {}, q - 1};
  for (int id = 1; id < q; ++id) {
    issued |= d.federation.approve(id, r.request_id).has_value();
    auto v = d.federation.authority(id).vote(r);
    partial.approvals.push_back({id, v->signature});
  }
  auto code = rejection([&] { d.edge->vpn_fetch(partial, {0, d.now}, d.now); });
  return {"sub_quorum_fetch", "edge fetch backed by q-1 genuine approvals",
          !issued && is_one_of(code, {ErrorCode::kAuthorization}), !code,
          std::to_string(q - 1) + " approvals, certificate " + (issued ? "issued" : "withheld") + ", fetch " +
              describe(code)};
}

AttackOutcome sub_quorum_unlock(const ScenarioConfig& cfg) {
  Deployment d(cfg, 3);
  const int q = cfg.federation.quorum(OperationClass::kLockUnlock);
  WorkflowRequest r = d.federation.authority(1).make_request(
      OperationClass::kLockUnlock, LockUnlockPayload{SystemStateKind::kAlert}, d.now, d.rng);
  d.federation.submit_request(r);
  bool issued = false;
  QuorumCertificate partial{r, request_hash(r), {}, q - 1};
  for (int id = 1; id < q; ++id) {
    issued |= d.federation.approve(id, r.request_id).has_value();
    partial.approvals.push_back({id, d.federation.authority(id).vote(r)->signature});
  }
  auto code = rejection([&] { d.federation.change_state(partial, SystemStateKind::kAlert, d.now); });
  auto denied = d.federation.expire(d.now + cfg.federation.vote_window_min + 1);
  bool logged = std::find(denied.begin(), denied.end(), r.request_id) != denied.end() &&
                d.ledger.count(LedgerKind::kDenial) > 0;
  bool passive = !d.federation.alert() && d.edge->locked_for_vpn() && d.vault->locked();
  return {"sub_quorum_unlock", "Passive to Alert with q-1 approvals",
          !issued && code.has_value() && logged && passive, !passive,
          "transition " + describe(code) + (logged ? ", expired request logged as denial" : ", no denial") +
              (passive ? ", stores stay locked" : ", STORES UNLOCKED")};
}

AttackOutcome ledger_tamper(const ScenarioConfig& cfg) {
  Deployment d(cfg, 4);
  d.set_state(SystemStateKind::kAlert);
  d.edge->vpn_fetch(d.must_certify(OperationClass::kBlindAnalysis), {0, d.now}, d.now);
  d.set_state(SystemStateKind::kPassive);
  std::ostringstream out;
  write_jsonl(out, d.ledger.entries());
  const std::string text = out.str();
  int detected = 0;
  const int trials = 100;
  for (int i = 0; i < trials; ++i) {
    std::string t = text;
    std::size_t pos = d.rng.next_u64() % t.size();
    t[pos] = static_cast<char>(t[pos] ^ static_cast<char>(1 + d.rng.next_u64() % 255));
    std::istringstream in(t);
    auto parsed = read_jsonl(in);
    if (!parsed || !verify_ledger(*parsed) || parsed->size() != d.ledger.size()) ++detected;
  }
  // Dropping and swapping whole entries.
  auto entries = d.ledger.entries();
  auto dropped = entries;
  dropped.erase(dropped.begin() + static_cast<std::ptrdiff_t>(entries.size() / 2));
  auto swapped = entries;
  std::swap(swapped[1], swapped[2]);
  bool structural = !verify_ledger(dropped) && !verify_ledger(swapped);
  return {"ledger_tamper", "single-byte edits, deletion and reordering of the exported ledger",
          detected == trials && structural, false,
          std::to_string(detected) + "/" + std::to_string(trials) + " byte edits detected, deletion/reorder " +
              (structural ? "detected" : "MISSED")};
}

AttackOutcome cloud_coalition(const ScenarioConfig& cfg) {
  Deployment d(cfg, 5);
  d.set_state(SystemStateKind::kAlert);
  Capability cap = d.capability(OperationClass::kBlindProcessing);
  const Bytes secret = secret_payload(d);
  const std::string id = d.vault->write(cap, secret, d.now, "coalition target");
  const VaultObject obj = d.vault->objects().front();
  const int n = cfg.vault.n_clouds;
  const int x = cfg.vault.key_threshold - 1;
  erasure::ReedSolomon rs(cfg.vault.k, n);
  const std::string needle(secret.begin(), secret.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(24, secret.size())));
  int coalitions = 0, blocked = 0, rebuilt = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != x) continue;
    ++coalitions;
    std::vector<erasure::Fragment> frags;
    std::vector<shamir::Share> shares;
    bool leaked = false;
    for (int c = 0; c < n; ++c) {
      if (!(mask & (1u << c))) continue;
      const StoredFragment& piece = d.vault->cloud(c + 1).holdings().at(id);
      frags.push_back(piece.fragment);
      shares.push_back(piece.key_share);
      std::string_view raw(reinterpret_cast<const char*>(piece.fragment.data.data()), piece.fragment.data.size());
      leaked |= raw.find(needle) != std::string_view::npos;
    }
    Bytes ct;
    if (static_cast<int>(frags.size()) >= cfg.vault.k) {
      ct = rs.decode(frags, obj.ciphertext_size, Execution::kSerial);
      ++rebuilt;
    }
    Bytes guess = shamir::reconstruct_secret(shares);
    crypto::SymmetricKey key{};
    std::copy_n(guess.begin(), std::min(guess.size(), key.size()), key.begin());
    Bytes plain;
    if (!ct.empty() && crypto::try_open(key, ct, plain)) leaked = true;
    if (!leaked) ++blocked;
  }
  return {"cloud_coalition", std::to_string(x) + " colluding vault clouds pool fragments and key shares",
          blocked == coalitions, blocked != coalitions,
          std::to_string(blocked) + "/" + std::to_string(coalitions) + " coalitions failed to decrypt (" +
              std::to_string(rebuilt) + " rebuilt the ciphertext)"};
}

AttackOutcome byzantine_fragment(const ScenarioConfig& cfg) {
  Deployment d(cfg, 6);
  d.set_state(SystemStateKind::kAlert);
  Capability write = d.capability(OperationClass::kBlindProcessing);
  const Bytes secret = secret_payload(d);
  const std::string id = d.vault->write(write, secret, d.now);
  Capability full = d.capability(OperationClass::kFullProcessing);
  int tolerated = 0;
  bool wrong_data = false;
  for (int c = 1; c <= cfg.vault.n_clouds; ++c) {
    d.vault->cloud(c).set_fault(CloudFault::kByzantine);
    try {
      Bytes got = d.vault->read(full, id);
      if (got == secret) ++tolerated; else wrong_data = true;
    } catch (const Error&) {
    }
    d.vault->cloud(c).set_fault(CloudFault::kHonest);
  }
  // Two corrupt clouds leave too few honest key shares: refuse, never misreport.
  d.vault->cloud(1).set_fault(CloudFault::kByzantine);
  d.vault->cloud(2).set_fault(CloudFault::kByzantine);
  std::optional<ErrorCode> two;
  try {
    if (d.vault->read(full, id) != secret) wrong_data = true;
  } catch (const Error& e) {
    two = e.code();
  }
  return {"byzantine_fragment", "a vault cloud returns corrupted fragments and shares",
          tolerated == cfg.vault.n_clouds && !wrong_data, false,
          std::to_string(tolerated) + "/" + std::to_string(cfg.vault.n_clouds) +
              " single corruptions tolerated; two corrupt clouds: " + describe(two) +
              (wrong_data ? "; WRONG DATA RETURNED" : "")};
}

AttackOutcome expired_pdr(const ScenarioConfig& cfg) {
  Deployment d(cfg, 7);
  const Minute ttl = cfg.pdr_ttl();
  d.now = 60 + ttl + 1;
  d.edge->prune(d.now);
  d.set_state(SystemStateKind::kAlert);
  auto sets = d.edge->vpn_fetch(d.must_certify(OperationClass::kBlindAnalysis), {0, d.now}, d.now);
  auto stale = std::count_if(sets.begin(), sets.end(), [&](const EncryptedPdrSet& s) { return d.now - s.minute > ttl; });
  auto audit = d.edge->audit_trail();
  bool zeroed = !audit.empty() && std::all_of(audit.begin(), audit.end(), [](const PruneRecord& r) { return r.zeroed; });
  return {"expired_pdr", "fetch of PDR sets older than the retention period",
          stale == 0 && sets.empty() && zeroed, stale > 0,
          std::to_string(audit.size()) + " sets pruned" + (zeroed ? " and zeroed" : "") + ", " +
              std::to_string(stale) + " stale sets returned"};
}

AttackOutcome wrong_class_certificate(const ScenarioConfig& cfg) {
  Deployment d(cfg, 8);
  d.set_state(SystemStateKind::kAlert);
  QuorumCertificate cert = d.must_certify(OperationClass::kBlindAnalysis);
  auto full = rejection([&] { d.federation.authorize_mode(cert, OperationClass::kFullProcessing, d.now); });
  auto lock = rejection([&] { d.federation.change_state(cert, SystemStateKind::kPassive, d.now); });
  return {"wrong_class_certificate", "BLIND_ANALYSIS certificate presented for key release and state change",
          is_one_of(full, {ErrorCode::kWrongClass}) && is_one_of(lock, {ErrorCode::kWrongClass}), !full,
          "key release " + describe(full) + ", state change " + describe(lock)};
}

AttackOutcome blind_decrypt(const ScenarioConfig& cfg) {
  Deployment d(cfg, 9);
  d.set_state(SystemStateKind::kAlert);
  Capability blind = d.capability(OperationClass::kBlindProcessing);
  const std::string id = d.vault->write(blind, secret_payload(d), d.now);
  auto key = rejection([&] { (void)blind.decryption_key("provider-0"); });
  auto read = rejection([&] { (void)d.vault->read(blind, id); });
  auto sealed = rejection([&] { (void)d.vault->read_encrypted(blind, id); });
  return {"blind_decrypt", "BLIND_PROCESSING capability asks for keys and plaintext",
          is_one_of(key, {ErrorCode::kAuthorization}) && is_one_of(read, {ErrorCode::kAuthorization}) && !sealed,
          !key || !read,
          "key " + describe(key) + ", plaintext read " + describe(read) + ", ciphertext read " + describe(sealed)};
}

AttackOutcome foreign_token(const ScenarioConfig& cfg) {
  Deployment home(cfg, 10);
  Deployment foreign(cfg, 11);
  const PhoneId phone = home.world.traces.front().phone;
  CrossBorderToken token = issue_token(phone, home.federation.public_key(kCrossBorderKeyId), "PT",
                                       SpaceTimeRegion{}, home.rng);
  foreign.set_state(SystemStateKind::kAlert);
  Capability cap = foreign.capability(OperationClass::kFullProcessing);
  auto code = rejection([&] { (void)redeem_token(token, cap); });
  home.set_state(SystemStateKind::kAlert);
  Capability own = home.capability(OperationClass::kFullProcessing);
  bool control = redeem_token(token, own) == phone;
  return {"foreign_token", "another federation's quorum redeems a cross-border token",
          is_one_of(code, {ErrorCode::kDecryption}) && control, !code,
          "foreign redemption " + describe(code) + ", home redemption " + (control ? "succeeds" : "FAILS")};
}

AttackOutcome replayed_certificate(const ScenarioConfig& cfg) {
  Deployment d(cfg, 12);
  d.set_state(SystemStateKind::kAlert);
  QuorumCertificate cert = d.must_certify(OperationClass::kFullProcessing);
  d.federation.authorize_mode(cert, OperationClass::kFullProcessing, d.now);
  auto again = rejection([&] { d.federation.authorize_mode(cert, OperationClass::kFullProcessing, d.now); });
  QuorumCertificate unlock = d.must_certify(OperationClass::kLockUnlock, LockUnlockPayload{SystemStateKind::kPassive});
  d.federation.change_state(unlock, SystemStateKind::kPassive, d.now);
  d.set_state(SystemStateKind::kAlert);
  auto relock = rejection([&] { d.federation.change_state(unlock, SystemStateKind::kPassive, d.now); });
  return {"replayed_certificate", "a consumed certificate is presented a second time",
          is_one_of(again, {ErrorCode::kAuthorization}) && is_one_of(relock, {ErrorCode::kAuthorization}), !again,
          "key release replay " + describe(again) + ", state change replay " + describe(relock)};
}

AttackOutcome passive_access(const ScenarioConfig& cfg) {
  Deployment d(cfg, 13);
  d.set_state(SystemStateKind::kAlert);
  QuorumCertificate fetch = d.must_certify(OperationClass::kBlindAnalysis);
  Capability write = d.capability(OperationClass::kBlindProcessing);
  const std::string id = d.vault->write(write, secret_payload(d), d.now);
  Capability full = d.capability(OperationClass::kFullProcessing);
  d.set_state(SystemStateKind::kPassive);
  auto edge = rejection([&] { d.edge->vpn_fetch(fetch, {0, d.now}, d.now); });
  auto vault = rejection([&] { (void)d.vault->read(full, id); });
  auto key = rejection([&] { (void)full.decryption_key("provider-0"); });
  bool purged = d.vault->object_count() == 0;
  return {"passive_access", "certificates and capabilities from the Alert epoch used after returning to Passive",
          is_one_of(edge, {ErrorCode::kLockedCloud}) && is_one_of(key, {ErrorCode::kLocked}) && vault && purged,
          !edge || !vault || !key,
          "edge fetch " + describe(edge) + ", vault read " + describe(vault) + ", key " + describe(key) +
              (purged ? ", vault purged" : ", VAULT NOT PURGED")};
}

AttackOutcome altered_request(const ScenarioConfig& cfg) {
  Deployment d(cfg, 14);
  d.set_state(SystemStateKind::kAlert);
  QuorumCertificate cert = d.must_certify(OperationClass::kBlindAnalysis);
  cert.request.op = OperationClass::kFullProcessing;
  cert.request_hash = request_hash(cert.request);
  auto code = rejection([&] { d.federation.authorize_mode(cert, OperationClass::kFullProcessing, d.now); });
  return {"altered_request", "operation class of a certified request rewritten after approval",
          is_one_of(code, {ErrorCode::kAuthorization}), !code, "key release " + describe(code)};
}

}  // namespace

std::vector<AttackOutcome> run_attack_suite(const ScenarioConfig& config) {
  validate(config);
  using Driver = AttackOutcome (*)(const ScenarioConfig&);
  const Driver drivers[] = {provider_forged_certificate, sub_quorum_fetch, sub_quorum_unlock,
                            ledger_tamper, cloud_coalition, byzantine_fragment,
                            expired_pdr, wrong_class_certificate, blind_decrypt,
                            foreign_token, replayed_certificate, passive_access,
                            altered_request};
  std::vector<AttackOutcome> out;
  for (Driver drive : drivers) {
    try {
      out.push_back(drive(config));
    } catch (const Error& e) {
      out.push_back({"driver_error", "", false, false, e.what()});
    }
  }
  return out;
}

nlohmann::json attack_matrix_json(const std::vector<AttackOutcome>& outcomes) {
  nlohmann::json rows = nlohmann::json::array();
  bool all = true;
  for (const AttackOutcome& o : outcomes) {
    rows.push_back({{"name", o.name}, {"description", o.description}, {"safe", o.safe},
                    {"extracted", o.extracted}, {"detail", o.detail}});
    all = all && o.safe;
  }
  return {{"attacks", rows}, {"all_safe", all}};
}

std::string attack_matrix_text(const std::vector<AttackOutcome>& outcomes) {
  std::ostringstream o;
  std::size_t width = 0;
  for (const AttackOutcome& a : outcomes) width = std::max(width, a.name.size());
  int safe = 0;
  for (const AttackOutcome& a : outcomes) {
    safe += a.safe;
    o << (a.safe ? "SAFE    " : "UNSAFE  ") << a.name << std::string(width - a.name.size() + 2, ' ')
      << a.detail << "\n";
  }
  o << safe << "/" << outcomes.size() << " attacks failed safely\n";
  return o.str();
}

}  // namespace prilok
