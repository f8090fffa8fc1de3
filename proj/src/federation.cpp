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

#include "prilok/federation.hpp"

#include <algorithm>
#include <numeric>

#include "prilok/error.hpp"

namespace prilok {

namespace {

constexpr std::uint8_t kPayloadLockUnlock = 0;
constexpr std::uint8_t kPayloadAccess = 1;

bool valid_request_id(const std::string& id) {
  return id.size() == 32 && std::all_of(id.begin(), id.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

void write_payload(ByteWriter& w, const RequestPayload& payload) {
  if (const auto* lu = std::get_if<LockUnlockPayload>(&payload)) {
    w.u8(kPayloadLockUnlock).u8(static_cast<std::uint8_t>(lu->target));
    return;
  }
  const auto& a = std::get<AccessPayload>(payload);
  w.u8(kPayloadAccess).prefixed(a.purpose);
  w.u8(a.phone ? 1 : 0);
  if (a.phone) w.prefixed(a.phone->nr).prefixed(a.phone->imei);
  w.u8(a.t_inf_min ? 1 : 0);
  if (a.t_inf_min) w.u64(static_cast<std::uint64_t>(*a.t_inf_min));
}

std::uint8_t read_flag(ByteReader& r) {
  std::uint8_t f = r.u8();
  if (f > 1) fail(ErrorCode::kFraming, "bad presence flag");
  return f;
}

RequestPayload read_payload(ByteReader& r) {
  std::uint8_t tag = r.u8();
  if (tag == kPayloadLockUnlock) {
    std::uint8_t target = r.u8();
    if (target > 1) fail(ErrorCode::kFraming, "bad target state");
    return LockUnlockPayload{static_cast<SystemStateKind>(target)};
  }
  if (tag != kPayloadAccess) fail(ErrorCode::kFraming, "bad payload tag");
  AccessPayload a;
  a.purpose = r.prefixed_string();
  if (read_flag(r)) {
    PhoneId p;
    p.nr = r.prefixed_string();
    p.imei = r.prefixed_string();
    a.phone = std::move(p);
  }
  if (read_flag(r)) a.t_inf_min = static_cast<Minute>(r.u64());
  return a;
}

template <std::size_t N>
std::array<std::uint8_t, N> read_array(ByteReader& r) {
  std::array<std::uint8_t, N> out{};
  ByteView v = r.raw(N);
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

WorkflowRequest read_request(ByteReader& r) {
  WorkflowRequest q;
  q.request_id = r.prefixed_string();
  std::uint8_t op = r.u8();
  if (op > static_cast<std::uint8_t>(OperationClass::kFullProcessing)) {
    fail(ErrorCode::kFraming, "bad operation class");
  }
  q.op = static_cast<OperationClass>(op);
  q.requester = static_cast<int>(r.u32());
  q.submitted_at = static_cast<Minute>(r.u64());
  q.payload = read_payload(r);
  return q;
}

}  // namespace

Bytes request_body(const WorkflowRequest& request) {
  ByteWriter w;
  w.prefixed(request.request_id)
      .u8(static_cast<std::uint8_t>(request.op))
      .u32(static_cast<std::uint32_t>(request.requester))
      .u64(static_cast<std::uint64_t>(request.submitted_at));
  write_payload(w, request.payload);
  return std::move(w).bytes();
}

crypto::Digest request_hash(const WorkflowRequest& request) {
  return crypto::sha256(request_body(request));
}

Bytes approval_message(const std::string& request_id, const crypto::Digest& hash) {
  ByteWriter w;
  w.prefixed(request_id).raw(crypto::view(hash));
  return std::move(w).bytes();
}

// --- Authority ----------------------------------------------------------------

Authority::Authority(int id, crypto::Drbg& rng) : id_(id), keys_(crypto::signing_keypair(rng)) {}

WorkflowRequest Authority::make_request(OperationClass op, RequestPayload payload, Minute now,
                                        crypto::Drbg& rng) const {
  WorkflowRequest r;
  r.request_id = to_hex(rng.bytes(16));
  r.op = op;
  r.payload = std::move(payload);
  r.requester = id_;
  r.submitted_at = now;
  r.signature = crypto::sign(keys_, request_body(r));
  return r;
}

std::optional<Vote> Authority::vote(const WorkflowRequest& request) const {
  if (behavior_ == AuthorityBehavior::kSilent) return std::nullopt;
  Vote v;
  v.request_id = request.request_id;
  v.authority = id_;
  v.request_hash = request_hash(request);
  if (behavior_ == AuthorityBehavior::kEquivocating) v.request_hash[0] ^= 0xff;
  v.signature = crypto::sign(keys_, approval_message(v.request_id, v.request_hash));
  return v;
}

void Authority::hold_share(const std::string& key_id, shamir::Share share) {
  shares_[key_id] = std::move(share);
}

const shamir::Share* Authority::share(const std::string& key_id) const {
  auto it = shares_.find(key_id);
  return it == shares_.end() ? nullptr : &it->second;
}

// --- Capability ---------------------------------------------------------------

unsigned rights_for(OperationClass op) {
  switch (op) {
    case OperationClass::kLockUnlock:
      return kRightDelete;
    case OperationClass::kStrictPush:
      return kRightWrite;
    case OperationClass::kBlindAnalysis:
      return kRightReadEncrypted;
    case OperationClass::kBlindProcessing:
      return kRightReadEncrypted | kRightWriteEncrypted | kRightWrite | kRightResolve;
    case OperationClass::kFullProcessing:
      return kRightWrite | kRightReadEncrypted | kRightWriteEncrypted | kRightDecrypt |
             kRightResolve | kRightDelete;
  }
  return 0;
}

Capability::KeyBag::~KeyBag() {
  for (auto& [id, key] : keys) crypto::wipe(key);
}

bool Capability::active() const { return state_ && state_->epoch == epoch_; }

void Capability::require(unsigned rights, std::string_view operation) const {
  if (!active()) {
    fail(ErrorCode::kLocked, std::string(operation) + ": capability lapsed with a state change");
  }
  if (!allows(rights)) {
    fail(ErrorCode::kAuthorization,
         std::string(operation) + ": not permitted under " + std::string(to_string(op_)));
  }
}

const crypto::BoxSecretKey& Capability::decryption_key(const std::string& key_id) const {
  require(kRightDecrypt, "decrypt");
  if (!keys_) fail(ErrorCode::kAuthorization, "no decryption keys released");
  auto it = keys_->keys.find(key_id);
  if (it == keys_->keys.end()) fail(ErrorCode::kAuthorization, "no key released for " + key_id);
  return it->second;
}

bool Capability::has_key(const std::string& key_id) const {
  return keys_ && keys_->keys.count(key_id) > 0;
}

// --- Federation ---------------------------------------------------------------

Federation::Federation(const FederationConfig& config, crypto::Drbg& rng, Ledger& ledger)
    : config_(config), rng_(rng.fork()), ledger_(ledger),
      state_(std::make_shared<SystemState>()) {
  if (config.n < 1 || config.n > 255) fail(ErrorCode::kConfiguration, "n must be in 1..255");
  if (config.n < 2 * config.f + 1) fail(ErrorCode::kConfiguration, "n must be >= 2f + 1");
  for (OperationClass op : kAllOperationClasses) {
    int q = config.quorum(op);
    if (q < config.f + 1 || q > config.n) {
      fail(ErrorCode::kConfiguration, "quorum must be in f+1..n");
    }
  }
  authorities_.reserve(static_cast<std::size_t>(config.n));
  for (int id = 1; id <= config.n; ++id) authorities_.emplace_back(id, rng_);
}

Authority& Federation::authority(int id) {
  if (id < 1 || id > n()) fail(ErrorCode::kUnknownAuthority, "unknown authority " + std::to_string(id));
  return authorities_[static_cast<std::size_t>(id - 1)];
}

const Authority& Federation::authority(int id) const {
  if (id < 1 || id > n()) fail(ErrorCode::kUnknownAuthority, "unknown authority " + std::to_string(id));
  return authorities_[static_cast<std::size_t>(id - 1)];
}

crypto::BoxPublicKey Federation::create_threshold_key(const std::string& key_id) {
  if (public_keys_.count(key_id)) fail(ErrorCode::kValidation, "key id already exists: " + key_id);
  crypto::BoxKeyPair kp = crypto::box_keypair(rng_);
  auto shares = shamir::split_secret(kp.secret_key, quorum(OperationClass::kFullProcessing), n(), rng_);
  crypto::wipe(kp.secret_key);
  for (auto& s : shares) authority(s.x).hold_share(key_id, std::move(s));
  public_keys_[key_id] = kp.public_key;
  return kp.public_key;
}

const crypto::BoxPublicKey& Federation::public_key(const std::string& key_id) const {
  auto it = public_keys_.find(key_id);
  if (it == public_keys_.end()) fail(ErrorCode::kValidation, "unknown key id " + key_id);
  return it->second;
}

std::vector<std::string> Federation::key_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, pk] : public_keys_) out.push_back(id);
  return out;
}

void Federation::submit_request(const WorkflowRequest& request) {
  const Authority& requester = authority(request.requester);
  if (!valid_request_id(request.request_id)) fail(ErrorCode::kValidation, "malformed request id");
  bool lock_payload = std::holds_alternative<LockUnlockPayload>(request.payload);
  if (lock_payload != (request.op == OperationClass::kLockUnlock)) {
    fail(ErrorCode::kValidation, "payload does not match operation class");
  }
  if (!crypto::verify(requester.public_key(), request_body(request), request.signature)) {
    fail(ErrorCode::kMalformedSignature, "request signature does not verify");
  }
  if (pending_.count(request.request_id) || consumed_.count(request.request_id)) {
    fail(ErrorCode::kValidation, "request id already used");
  }
  Pending p;
  p.request = request;
  p.hash = request_hash(request);
  pending_.emplace(request.request_id, std::move(p));
  ledger_.append({LedgerKind::kRequest, request.request_id,
                  std::string(to_string(request.op)) + " by authority " +
                      std::to_string(request.requester),
                  request.submitted_at});
}

std::optional<QuorumCertificate> Federation::approve(const Vote& vote) {
  auto it = pending_.find(vote.request_id);
  if (it == pending_.end()) fail(ErrorCode::kUnknownRequest, "no pending request " + vote.request_id);
  Pending& p = it->second;
  const Authority& voter = authority(vote.authority);
  if (p.voted.count(vote.authority)) {
    fail(ErrorCode::kDuplicateVote, "authority " + std::to_string(vote.authority) + " already voted");
  }
  if (vote.request_hash != p.hash ||
      !crypto::verify(voter.public_key(), approval_message(vote.request_id, p.hash),
                      vote.signature)) {
    fail(ErrorCode::kMalformedSignature, "vote does not sign the request hash");
  }
  p.voted.insert(vote.authority);
  p.approvals[vote.authority] = Approval{vote.authority, vote.signature};
  if (p.certified) return std::nullopt;
  int q = quorum(p.request.op);
  if (static_cast<int>(p.approvals.size()) < q) return std::nullopt;

  QuorumCertificate cert;
  cert.request = p.request;
  cert.request_hash = p.hash;
  cert.required_q = q;
  for (const auto& [id, a] : p.approvals) cert.approvals.push_back(a);
  p.certified = true;
  std::string ids;
  for (const Approval& a : cert.approvals) ids += (ids.empty() ? "" : ",") + std::to_string(a.authority);
  ledger_.append({LedgerKind::kCertificate, p.request.request_id,
                  std::string(to_string(p.request.op)) + " approved by " + ids,
                  p.request.submitted_at});
  return cert;
}

std::optional<QuorumCertificate> Federation::approve(int authority_id, const std::string& request_id) {
  auto it = pending_.find(request_id);
  if (it == pending_.end()) fail(ErrorCode::kUnknownRequest, "no pending request " + request_id);
  auto vote = authority(authority_id).vote(it->second.request);
  if (!vote) return std::nullopt;
  return approve(*vote);
}

std::vector<std::string> Federation::expire(Minute now) {
  std::vector<std::string> denied;
  for (auto it = pending_.begin(); it != pending_.end();) {
    const Pending& p = it->second;
    if (!p.certified && now - p.request.submitted_at > config_.vote_window_min) {
      ledger_.append({LedgerKind::kDenial, it->first,
                      std::string(to_string(p.request.op)) + ": " +
                          std::to_string(p.approvals.size()) + " of " +
                          std::to_string(quorum(p.request.op)) + " approvals in the vote window",
                      now});
      denied.push_back(it->first);
      it = pending_.erase(it);
    } else {
      ++it;
    }
  }
  return denied;
}

bool Federation::is_pending(const std::string& request_id) const {
  auto it = pending_.find(request_id);
  return it != pending_.end() && !it->second.certified;
}

bool Federation::verify(const QuorumCertificate& cert) const {
  const WorkflowRequest& r = cert.request;
  if (r.requester < 1 || r.requester > n()) return false;
  if (!valid_request_id(r.request_id)) return false;
  if (std::holds_alternative<LockUnlockPayload>(r.payload) != (r.op == OperationClass::kLockUnlock)) {
    return false;
  }
  if (!crypto::verify(authority(r.requester).public_key(), request_body(r), r.signature)) return false;
  if (cert.request_hash != request_hash(r)) return false;
  int q = quorum(r.op);
  if (cert.required_q != q) return false;
  if (static_cast<int>(cert.approvals.size()) < q) return false;
  Bytes msg = approval_message(r.request_id, cert.request_hash);
  int last = 0;
  for (const Approval& a : cert.approvals) {
    if (a.authority <= last || a.authority > n()) return false;  // sorted, distinct, known
    if (!crypto::verify(authority(a.authority).public_key(), msg, a.signature)) return false;
    last = a.authority;
  }
  return true;
}

void Federation::require(const QuorumCertificate& cert, std::initializer_list<OperationClass> allowed,
                         std::string_view operation, Minute now) {
  if (!verify(cert)) {
    ledger_.append({LedgerKind::kAccessDenied, cert.request.request_id,
                    std::string(operation) + ": invalid or insufficient certificate", now});
    fail(ErrorCode::kAuthorization, std::string(operation) + ": invalid or insufficient certificate");
  }
  if (std::find(allowed.begin(), allowed.end(), cert.op()) == allowed.end()) {
    ledger_.append({LedgerKind::kAccessDenied, cert.request.request_id,
                    std::string(operation) + ": wrong class " + std::string(to_string(cert.op())),
                    now});
    fail(ErrorCode::kWrongClass, std::string(operation) + ": certificate of class " +
                                     std::string(to_string(cert.op())) + " not accepted");
  }
}

void Federation::consume(const QuorumCertificate& cert, Minute now) {
  if (!consumed_.insert(cert.request.request_id).second) {
    ledger_.append({LedgerKind::kAccessDenied, cert.request.request_id, "certificate replayed", now});
    fail(ErrorCode::kAuthorization, "certificate already exercised");
  }
}

void Federation::add_listener(StateListener* listener) { listeners_.push_back(listener); }

SystemState Federation::change_state(const QuorumCertificate& cert, SystemStateKind target, Minute now) {
  require(cert, {OperationClass::kLockUnlock}, "change_state", now);
  const auto& payload = std::get<LockUnlockPayload>(cert.request.payload);
  if (payload.target != target) {
    ledger_.append({LedgerKind::kAccessDenied, cert.request_id(),
                    "change_state: certificate authorises a different target", now});
    fail(ErrorCode::kAuthorization, "certificate authorises a transition to " +
                                        std::string(to_string(payload.target)));
  }
  if (target == state_->state) {
    fail(ErrorCode::kInvalidTransition, "system already in " + std::string(to_string(target)));
  }
  consume(cert, now);
  SystemStateKind from = state_->state;
  state_->state = target;
  state_->epoch += 1;
  state_->alert_started = target == SystemStateKind::kAlert ? std::optional<Minute>(now) : std::nullopt;
  ledger_.append({LedgerKind::kStateChange, cert.request_id(),
                  std::string(to_string(from)) + " -> " + std::string(to_string(target)), now});
  Capability cap = mint(OperationClass::kLockUnlock, cert.request_id(),
                        rights_for(OperationClass::kLockUnlock), nullptr);
  for (StateListener* l : listeners_) l->on_state_change(target, cap, now);
  return *state_;
}

Capability Federation::mint(OperationClass op, const std::string& request_id, unsigned rights,
                            std::shared_ptr<const Capability::KeyBag> keys) const {
  return Capability(op, request_id, rights, state_, state_->epoch, std::move(keys));
}

Capability Federation::authorize_mode(const QuorumCertificate& cert, OperationClass op, Minute now) {
  require(cert, {op}, "authorize_mode", now);
  if (op != OperationClass::kLockUnlock && op != OperationClass::kStrictPush && !alert()) {
    ledger_.append({LedgerKind::kAccessDenied, cert.request_id(),
                    "authorize_mode: " + std::string(to_string(op)) + " requires Alert", now});
    fail(ErrorCode::kLocked, std::string(to_string(op)) + " requires the Alert state");
  }
  consume(cert, now);
  std::shared_ptr<Capability::KeyBag> bag;
  if (op == OperationClass::kFullProcessing) {
    std::vector<int> ids;
    for (const Approval& a : cert.approvals) ids.push_back(a.authority);
    bag = std::make_shared<Capability::KeyBag>();
    for (const auto& [key_id, pk] : public_keys_) {
      bag->keys[key_id] = reconstruct_key(key_id, ids, now, cert.request_id());
    }
  }
  ledger_.append({LedgerKind::kCapability, cert.request_id(),
                  std::string(to_string(op)) + " capability issued", now});
  return mint(op, cert.request_id(), rights_for(op), std::move(bag));
}

crypto::BoxSecretKey Federation::reconstruct_key(const std::string& key_id,
                                                 const std::vector<int>& authority_ids, Minute now,
                                                 const std::string& request_id) {
  const crypto::BoxPublicKey& pk = public_key(key_id);
  std::vector<shamir::Share> shares;
  for (int id : authority_ids) {
    if (const shamir::Share* s = authority(id).share(key_id)) shares.push_back(*s);
  }
  const int t = quorum(OperationClass::kFullProcessing);
  const int m = static_cast<int>(shares.size());
  if (m >= t) {
    // Lexicographic t-subsets; the first is the common case.
    std::vector<int> idx(static_cast<std::size_t>(t));
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      std::vector<shamir::Share> subset;
      for (int i : idx) subset.push_back(shares[static_cast<std::size_t>(i)]);
      Bytes secret = shamir::reconstruct_secret(subset);
      crypto::BoxSecretKey sk{};
      if (secret.size() == sk.size()) {
        std::copy(secret.begin(), secret.end(), sk.begin());
        crypto::wipe(secret);
        if (crypto::box_public_from_secret(sk) == pk) {
          ledger_.append({LedgerKind::kKeyReconstruction, request_id, key_id, now});
          return sk;
        }
        crypto::wipe(sk);
      }
      int i = t - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - t + i) --i;
      if (i < 0) break;
      ++idx[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < t; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  ledger_.append({LedgerKind::kAccessDenied, request_id, "key reconstruction failed: " + key_id, now});
  fail(ErrorCode::kReconstruction, "could not reconstruct key " + key_id);
}

std::optional<QuorumCertificate> run_quorum(Federation& federation, int requester, OperationClass op,
                                            RequestPayload payload, Minute now, crypto::Drbg& rng) {
  WorkflowRequest r = federation.authority(requester).make_request(op, std::move(payload), now, rng);
  federation.submit_request(r);
  // Votes arrive in a seeded random order.
  std::vector<int> order(static_cast<std::size_t>(federation.n()));
  std::iota(order.begin(), order.end(), 1);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.next_u64() % i]);
  }
  for (int id : order) {
    try {
      if (auto cert = federation.approve(id, r.request_id)) return cert;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMalformedSignature) throw;
    }
  }
  return std::nullopt;
}

// --- wire framing -------------------------------------------------------------

Bytes encode_request(const WorkflowRequest& request) {
  ByteWriter w;
  w.raw(request_body(request)).raw(request.signature);
  return std::move(w).bytes();
}

WorkflowRequest decode_request(ByteView bytes) {
  ByteReader r(bytes);
  WorkflowRequest q = read_request(r);
  q.signature = read_array<64>(r);
  r.expect_done();
  return q;
}

Bytes encode_vote(const Vote& vote) {
  ByteWriter w;
  w.prefixed(vote.request_id)
      .u32(static_cast<std::uint32_t>(vote.authority))
      .raw(crypto::view(vote.request_hash))
      .raw(vote.signature);
  return std::move(w).bytes();
}

Vote decode_vote(ByteView bytes) {
  ByteReader r(bytes);
  Vote v;
  v.request_id = r.prefixed_string();
  v.authority = static_cast<int>(r.u32());
  v.request_hash = read_array<32>(r);
  v.signature = read_array<64>(r);
  r.expect_done();
  return v;
}

Bytes encode_certificate(const QuorumCertificate& cert) {
  ByteWriter w;
  w.prefixed(encode_request(cert.request))
      .raw(crypto::view(cert.request_hash))
      .u32(static_cast<std::uint32_t>(cert.required_q))
      .u32(static_cast<std::uint32_t>(cert.approvals.size()));
  for (const Approval& a : cert.approvals) {
    w.u32(static_cast<std::uint32_t>(a.authority)).raw(a.signature);
  }
  return std::move(w).bytes();
}

QuorumCertificate decode_certificate(ByteView bytes) {
  ByteReader r(bytes);
  QuorumCertificate c;
  c.request = decode_request(r.prefixed());
  c.request_hash = read_array<32>(r);
  c.required_q = static_cast<int>(r.u32());
  std::uint32_t count = r.u32();
  if (count > 255) fail(ErrorCode::kFraming, "too many approvals");
  for (std::uint32_t i = 0; i < count; ++i) {
    Approval a;
    a.authority = static_cast<int>(r.u32());
    a.signature = read_array<64>(r);
    c.approvals.push_back(a);
  }
  r.expect_done();
  return c;
}

}  // namespace prilok
