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

#include "prilok/edge_cloud.hpp"

#include <algorithm>

#include "prilok/error.hpp"

namespace prilok {

namespace {

void write_entry(ByteWriter& w, const EncryptedPdrSet& e) {
  w.u64(static_cast<std::uint64_t>(e.minute))
      .prefixed(e.bs_code_hint.code)
      .u8(static_cast<std::uint8_t>(e.bs_code_hint.precision))
      .prefixed(e.ciphertext);
}

EncryptedPdrSet read_entry(ByteReader& r) {
  EncryptedPdrSet e;
  e.minute = static_cast<Minute>(r.u64());
  e.bs_code_hint.code = r.prefixed_string();
  std::uint8_t p = r.u8();
  if (p > 2) fail(ErrorCode::kFraming, "bad precision class");
  e.bs_code_hint.precision = static_cast<PrecisionClass>(p);
  ByteView ct = r.prefixed();
  e.ciphertext.assign(ct.begin(), ct.end());
  return e;
}

}  // namespace

Bytes encode_fetch_request(const FetchRequest& request) {
  ByteWriter w;
  w.prefixed(encode_certificate(request.certificate))
      .u64(static_cast<std::uint64_t>(request.range.first))
      .u64(static_cast<std::uint64_t>(request.range.last))
      .u32(static_cast<std::uint32_t>(request.cells.size()));
  for (const std::string& c : request.cells) w.prefixed(c);
  return std::move(w).bytes();
}

FetchRequest decode_fetch_request(ByteView bytes) {
  ByteReader r(bytes);
  FetchRequest q;
  q.certificate = decode_certificate(r.prefixed());
  q.range.first = static_cast<Minute>(r.u64());
  q.range.last = static_cast<Minute>(r.u64());
  std::uint32_t n = r.u32();
  if (n > r.remaining()) fail(ErrorCode::kFraming, "cell count exceeds message");
  for (std::uint32_t i = 0; i < n; ++i) q.cells.push_back(r.prefixed_string());
  r.expect_done();
  return q;
}

Bytes encode_fetch_response(const FetchResponse& response) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(response.sets.size()));
  for (const EncryptedPdrSet& e : response.sets) write_entry(w, e);
  return std::move(w).bytes();
}

FetchResponse decode_fetch_response(ByteView bytes) {
  ByteReader r(bytes);
  FetchResponse out;
  std::uint32_t n = r.u32();
  if (n > r.remaining()) fail(ErrorCode::kFraming, "set count exceeds message");
  for (std::uint32_t i = 0; i < n; ++i) out.sets.push_back(read_entry(r));
  r.expect_done();
  return out;
}

Bytes encrypt_pdr_set(const PdrSet& set, const crypto::BoxPublicKey& key, crypto::Drbg& rng) {
  Bytes plain = serialize_pdr_set(set);
  Bytes ct = crypto::hybrid_encrypt(key, plain, rng);
  crypto::wipe(plain);
  return ct;
}

PdrSet decrypt_pdr_set(const EncryptedPdrSet& entry, const crypto::BoxSecretKey& key,
                       const PrecisionLookup& precision_of) {
  Bytes plain = crypto::hybrid_decrypt(key, entry.ciphertext);
  PdrSet set = deserialize_pdr_set(plain, precision_of);
  crypto::wipe(plain);
  if (set.minute != entry.minute || set.bs.code != entry.bs_code_hint.code) {
    fail(ErrorCode::kIntegrity, "cleartext metadata disagrees with the enclosed set");
  }
  return set;
}

bool ProviderPort::push(const PdrSet& set) { return cloud_->push(set); }

EdgeCloud::EdgeCloud(int provider, std::string key_id, Federation& federation, Minute pdr_ttl,
                     crypto::Drbg rng)
    : provider_(provider), key_id_(std::move(key_id)), federation_(federation), pdr_ttl_(pdr_ttl),
      rng_(rng) {
  if (pdr_ttl < 0) fail(ErrorCode::kParameter, "pdr_ttl must be >= 0");
  locked_ = !federation.alert();
}

bool EdgeCloud::push(const PdrSet& set) { return push(set, federation_.public_key(key_id_)); }

bool EdgeCloud::push(const PdrSet& set, const crypto::BoxPublicKey& federation_key) {
  std::lock_guard lock(mu_);
  EncryptedPdrSet e;
  try {
    e.ciphertext = encrypt_pdr_set(set, federation_key, rng_);
  } catch (const Error&) {
    ++metrics_.dropped;
    return false;
  }
  e.minute = set.minute;
  e.bs_code_hint = set.bs;
  store_.push_back(std::move(e));
  ++metrics_.pushed;
  return true;
}

std::size_t EdgeCloud::prune(Minute now) {
  std::lock_guard lock(mu_);
  std::size_t removed = 0;
  auto keep = store_.begin();
  for (auto it = store_.begin(); it != store_.end(); ++it) {
    if (now - it->minute > pdr_ttl_) {
      PruneRecord rec{now, it->minute, it->bs_code_hint.code, it->ciphertext.size(), false};
      crypto::wipe(it->ciphertext);
      rec.zeroed = std::all_of(it->ciphertext.begin(), it->ciphertext.end(),
                               [](std::uint8_t b) { return b == 0; });
      audit_.push_back(std::move(rec));
      ++removed;
    } else {
      if (keep != it) *keep = std::move(*it);
      ++keep;
    }
  }
  store_.erase(keep, store_.end());
  metrics_.pruned += removed;
  if (removed > 0) {
    federation_.ledger().append({LedgerKind::kPrune, "",
                                 "provider " + std::to_string(provider_) + ": " +
                                     std::to_string(removed) + " sets",
                                 now});
  }
  return removed;
}

std::optional<Minute> EdgeCloud::oldest_age(Minute now) const {
  std::lock_guard lock(mu_);
  std::optional<Minute> age;
  for (const EncryptedPdrSet& e : store_) age = std::max(age.value_or(now - e.minute), now - e.minute);
  return age;
}

std::vector<EncryptedPdrSet> EdgeCloud::vpn_fetch(const QuorumCertificate& cert, MinuteRange range,
                                                  Minute now, const std::vector<std::string>& cells) {
  std::unique_lock lock(mu_);
  if (locked_) {
    ++metrics_.denied_fetches;
    lock.unlock();
    federation_.ledger().append({LedgerKind::kAccessDenied, cert.request.request_id,
                                 "vpn_fetch: provider " + std::to_string(provider_) +
                                     " cloud locked",
                                 now});
    fail(ErrorCode::kLockedCloud, "edge cloud is locked to VPN operations");
  }
  lock.unlock();
  try {
    federation_.require(cert,
                        {OperationClass::kBlindAnalysis, OperationClass::kBlindProcessing,
                         OperationClass::kFullProcessing},
                        "vpn_fetch", now);
  } catch (const Error&) {
    lock.lock();
    ++metrics_.denied_fetches;
    throw;
  }
  lock.lock();
  std::set<std::string> wanted(cells.begin(), cells.end());
  std::vector<EncryptedPdrSet> out;
  for (const EncryptedPdrSet& e : store_) {
    if (!range.contains(e.minute)) continue;
    if (!wanted.empty() && !wanted.count(e.bs_code_hint.code)) continue;
    out.push_back(e);
  }
  ++metrics_.fetches;
  lock.unlock();
  federation_.ledger().append({LedgerKind::kEdgeFetch, cert.request.request_id,
                               "provider " + std::to_string(provider_) + ": " +
                                   std::to_string(out.size()) + " sets in [" +
                                   std::to_string(range.first) + ", " +
                                   std::to_string(range.last) + "]",
                               now});
  return out;
}

Bytes EdgeCloud::handle_fetch(ByteView request, Minute now) {
  FetchRequest q = decode_fetch_request(request);
  FetchResponse resp{vpn_fetch(q.certificate, q.range, now, q.cells)};
  return encode_fetch_response(resp);
}

bool EdgeCloud::locked_for_vpn() const {
  std::lock_guard lock(mu_);
  return locked_;
}

void EdgeCloud::on_state_change(SystemStateKind state, const Capability& authority, Minute) {
  if (authority.op() != OperationClass::kLockUnlock || !authority.active()) {
    fail(ErrorCode::kAuthorization, "state change needs an active LOCK_UNLOCK capability");
  }
  std::lock_guard lock(mu_);
  locked_ = state == SystemStateKind::kPassive;
}

std::size_t EdgeCloud::size() const {
  std::lock_guard lock(mu_);
  return store_.size();
}

EdgeMetrics EdgeCloud::metrics() const {
  std::lock_guard lock(mu_);
  return metrics_;
}

std::vector<PruneRecord> EdgeCloud::audit_trail() const {
  std::lock_guard lock(mu_);
  return audit_;
}

std::vector<EncryptedPdrSet> EdgeCloud::storage_snapshot() const {
  std::lock_guard lock(mu_);
  return store_;
}

}  // namespace prilok
