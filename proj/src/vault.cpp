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

#include "prilok/vault.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "json.hpp"
#include "prilok/error.hpp"

namespace prilok {

namespace {


// Calls fn on every t-subset of 0..m-1 in lexicographic order until it
// returns true.
bool any_combination(int m, int t, const std::function<bool(const std::vector<int>&)>& fn) {
  if (t < 0 || t > m) return false;
  std::vector<int> idx(static_cast<std::size_t>(t));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    if (fn(idx)) return true;
    int i = t - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - t + i) --i;
    if (i < 0) return false;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < t; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

}  // namespace

std::string_view to_string(CloudFault f) {
  switch (f) {
    case CloudFault::kHonest: return "honest";
    case CloudFault::kCrashed: return "crashed";
    case CloudFault::kByzantine: return "byzantine";
  }
  return "honest";
}

Bytes encode_fragment_message(const StoredFragment& f) {
  Bytes id = from_hex(f.object_id);
  if (id.size() != 16) fail(ErrorCode::kFraming, "object id must be 16 bytes");
  ByteWriter w;
  w.raw(id).u8(f.fragment.index).prefixed(f.fragment.data).prefixed(shamir::encode_share(f.key_share));
  return std::move(w).bytes();
}

StoredFragment decode_fragment_message(ByteView bytes) {
  ByteReader r(bytes);
  StoredFragment f;
  f.object_id = to_hex(r.raw(16));
  f.fragment.index = r.u8();
  ByteView data = r.prefixed();
  f.fragment.data.assign(data.begin(), data.end());
  f.key_share = shamir::decode_share(r.prefixed());
  r.expect_done();
  return f;
}

// --- CloudNode ----------------------------------------------------------------

bool CloudNode::store(const StoredFragment& fragment) {
  if (fault_ == CloudFault::kCrashed) return false;
  held_[fragment.object_id] = fragment;
  return true;
}

std::optional<StoredFragment> CloudNode::fetch(const std::string& object_id) const {
  if (fault_ == CloudFault::kCrashed) return std::nullopt;
  auto it = held_.find(object_id);
  if (it == held_.end()) return std::nullopt;
  StoredFragment out = it->second;
  if (fault_ == CloudFault::kByzantine) {
    // Noise keyed by node and object, so two liars never cancel out.
    crypto::Drbg noise(crypto::sha256(to_bytes("byzantine:" + std::to_string(id_) + ":" + object_id)));
    Bytes a = noise.bytes(out.fragment.data.size()), b = noise.bytes(out.key_share.y.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.fragment.data[i] ^= a[i] | 1;
    for (std::size_t i = 0; i < b.size(); ++i) out.key_share.y[i] ^= b[i] | 1;
  }
  return out;
}

// Deletions are queued and applied even by a crashed node once it recovers;
// the simulation applies them immediately.
bool CloudNode::erase(const std::string& object_id) {
  auto it = held_.find(object_id);
  if (it == held_.end()) return false;
  crypto::wipe(it->second.fragment.data);
  crypto::wipe(it->second.key_share.y);
  held_.erase(it);
  return true;
}

// --- Vault --------------------------------------------------------------------

Vault::Vault(const VaultConfig& config, Federation& federation, crypto::Drbg rng, Execution exec)
    : config_(config), federation_(federation), rng_(rng), exec_(exec),
      rs_(config.k, config.n_clouds) {
  if (config.key_threshold < 1 || config.key_threshold > config.n_clouds) {
    fail(ErrorCode::kConfiguration, "key threshold must be in 1..n_clouds");
  }
  for (int i = 1; i <= config.n_clouds; ++i) clouds_.emplace_back(i);
  locked_ = !federation.alert();
}

CloudNode& Vault::cloud(int id) {
  if (id < 1 || id > config_.n_clouds) fail(ErrorCode::kParameter, "no cloud " + std::to_string(id));
  return clouds_[static_cast<std::size_t>(id - 1)];
}

const CloudNode& Vault::cloud(int id) const {
  if (id < 1 || id > config_.n_clouds) fail(ErrorCode::kParameter, "no cloud " + std::to_string(id));
  return clouds_[static_cast<std::size_t>(id - 1)];
}

bool Vault::locked() const {
  std::lock_guard lock(mu_);
  return locked_;
}

std::string Vault::write(const Capability& capability, ByteView plaintext, Minute now,
                         const std::string& label) {
  capability.require(kRightWrite, "vault_write");
  std::lock_guard lock(mu_);
  if (locked_) fail(ErrorCode::kLocked, "vault is locked in the Passive state");

  VaultObject obj;
  obj.object_id = to_hex(rng_.bytes(16));
  obj.label = label;
  obj.plaintext_digest = crypto::sha256(plaintext);
  obj.plaintext_size = plaintext.size();
  obj.k = config_.k;
  obj.n = config_.n_clouds;
  obj.key_threshold = config_.key_threshold;
  obj.created = now;

  crypto::SymmetricKey key = rng_.key();
  Bytes ct = crypto::seal(key, plaintext, rng_);
  obj.ciphertext_digest = crypto::sha256(ct);
  obj.ciphertext_size = ct.size();
  std::vector<erasure::Fragment> fragments = rs_.encode(ct, exec_);
  std::vector<shamir::Share> shares =
      shamir::split_secret(key, config_.key_threshold, config_.n_clouds, rng_);
  crypto::wipe(key);

  std::vector<int> acked;
  for (int i = 0; i < config_.n_clouds; ++i) {
    StoredFragment piece{obj.object_id, fragments[static_cast<std::size_t>(i)],
                         shares[static_cast<std::size_t>(i)]};
    if (clouds_[static_cast<std::size_t>(i)].store(piece)) acked.push_back(i + 1);
  }
  for (auto& s : shares) crypto::wipe(s.y);
  const int needed = std::max(config_.k, config_.key_threshold);
  if (static_cast<int>(acked.size()) < needed) {
    for (int id : acked) clouds_[static_cast<std::size_t>(id - 1)].erase(obj.object_id);
    fail(ErrorCode::kWriteFailure, std::to_string(acked.size()) + " of " +
                                       std::to_string(config_.n_clouds) + " clouds acked, " +
                                       std::to_string(needed) + " needed");
  }
  objects_[obj.object_id] = obj;
  federation_.ledger().append({LedgerKind::kVaultWrite, capability.request_id(),
                               obj.object_id + " " + std::to_string(obj.plaintext_size) + " bytes" +
                                   (label.empty() ? "" : " (" + label + ")"),
                               now});
  return obj.object_id;
}

const VaultObject& Vault::object(const std::string& object_id) const {
  auto it = objects_.find(object_id);
  if (it == objects_.end()) fail(ErrorCode::kUnknownObject, "unknown object " + object_id);
  return it->second;
}

std::vector<StoredFragment> Vault::gather(const std::string& object_id) const {
  std::vector<StoredFragment> out;
  for (const CloudNode& c : clouds_) {
    if (auto f = c.fetch(object_id)) out.push_back(std::move(*f));
  }
  return out;
}

Bytes Vault::decode_ciphertext(const VaultObject& obj, const std::vector<StoredFragment>& pieces) const {
  const int m = static_cast<int>(pieces.size());
  if (m < obj.k) fail(ErrorCode::kUnavailable, "fewer than k fragments available");
  Bytes found;
  bool ok = any_combination(m, obj.k, [&](const std::vector<int>& idx) {
    std::vector<erasure::Fragment> subset;
    for (int i : idx) subset.push_back(pieces[static_cast<std::size_t>(i)].fragment);
    Bytes ct = rs_.decode(subset, obj.ciphertext_size, exec_);
    if (crypto::sha256(ct) != obj.ciphertext_digest) return false;
    found = std::move(ct);
    return true;
  });
  if (!ok) fail(ErrorCode::kIntegrity, "no fragment subset matches the ciphertext digest");
  return found;
}

Bytes Vault::read(const Capability& capability, const std::string& object_id) const {
  capability.require(kRightDecrypt, "vault_read");
  std::lock_guard lock(mu_);
  if (locked_) fail(ErrorCode::kLocked, "vault is locked in the Passive state");
  const VaultObject& obj = object(object_id);
  std::vector<StoredFragment> pieces = gather(object_id);
  const int m = static_cast<int>(pieces.size());
  if (m < obj.k) fail(ErrorCode::kUnavailable, "fewer than k fragments available");
  if (m < obj.key_threshold) fail(ErrorCode::kUnavailable, "fewer than key_threshold shares available");

  // Every k-subset of fragments against every threshold-subset of shares,
  // until decryption succeeds and the plaintext digest matches.
  Bytes plain;
  bool ok = any_combination(m, obj.k, [&](const std::vector<int>& fidx) {
    std::vector<erasure::Fragment> frags;
    for (int i : fidx) frags.push_back(pieces[static_cast<std::size_t>(i)].fragment);
    Bytes ct = rs_.decode(frags, obj.ciphertext_size, exec_);
    return any_combination(m, obj.key_threshold, [&](const std::vector<int>& sidx) {
      std::vector<shamir::Share> shares;
      for (int i : sidx) shares.push_back(pieces[static_cast<std::size_t>(i)].key_share);
      Bytes secret = shamir::reconstruct_secret(shares);
      crypto::SymmetricKey key{};
      if (secret.size() != key.size()) return false;
      std::copy(secret.begin(), secret.end(), key.begin());
      crypto::wipe(secret);
      Bytes candidate;
      bool opened = crypto::try_open(key, ct, candidate);
      crypto::wipe(key);
      if (!opened || crypto::sha256(candidate) != obj.plaintext_digest) return false;
      plain = std::move(candidate);
      return true;
    });
  });
  if (!ok) fail(ErrorCode::kIntegrity, "no fragment and share combination matches the digest");
  return plain;
}

Bytes Vault::read_encrypted(const Capability& capability, const std::string& object_id) const {
  capability.require(kRightReadEncrypted, "vault_read_encrypted");
  std::lock_guard lock(mu_);
  if (locked_) fail(ErrorCode::kLocked, "vault is locked in the Passive state");
  const VaultObject& obj = object(object_id);
  return decode_ciphertext(obj, gather(object_id));
}

DeletionProof Vault::erase_objects(std::vector<std::string> ids, Minute now) {
  std::sort(ids.begin(), ids.end());
  DeletionProof proof;
  proof.minute = now;
  std::vector<bool> confirmed(clouds_.size(), false);
  for (const std::string& id : ids) {
    for (std::size_t c = 0; c < clouds_.size(); ++c) {
      if (clouds_[c].erase(id)) confirmed[c] = true;
    }
    objects_.erase(id);
  }
  for (std::size_t c = 0; c < clouds_.size(); ++c) {
    if (confirmed[c]) proof.clouds_erased.push_back(static_cast<int>(c + 1));
  }
  ByteWriter w;
  for (const std::string& id : ids) w.prefixed(id);
  w.u64(static_cast<std::uint64_t>(now));
  proof.digest = crypto::sha256(w.bytes());
  proof.object_ids = std::move(ids);
  return proof;
}

DeletionProof Vault::remove(const Capability& capability, const std::string& object_id, Minute now) {
  capability.require(kRightDelete, "vault_delete");
  std::lock_guard lock(mu_);
  object(object_id);
  DeletionProof proof = erase_objects({object_id}, now);
  federation_.ledger().append({LedgerKind::kVaultDelete, capability.request_id(),
                               "1 object: " + to_hex(crypto::view(proof.digest)), now});
  return proof;
}

DeletionProof Vault::remove_all(const Capability& capability, Minute now) {
  capability.require(kRightDelete, "vault_delete");
  std::lock_guard lock(mu_);
  std::vector<std::string> ids;
  for (const auto& [id, obj] : objects_) ids.push_back(id);
  // Also sweep pieces of objects whose write was rolled back mid-flight.
  for (const CloudNode& c : clouds_) {
    for (const auto& [id, piece] : c.holdings()) {
      if (!objects_.count(id)) ids.push_back(id);
    }
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  DeletionProof proof = erase_objects(std::move(ids), now);
  federation_.ledger().append({LedgerKind::kVaultDelete, capability.request_id(),
                               std::to_string(proof.object_ids.size()) + " objects: " +
                                   to_hex(crypto::view(proof.digest)),
                               now});
  return proof;
}

void Vault::on_state_change(SystemStateKind state, const Capability& authority, Minute now) {
  if (state == SystemStateKind::kPassive) {
    remove_all(authority, now);
    std::lock_guard lock(mu_);
    locked_ = true;
  } else {
    if (authority.op() != OperationClass::kLockUnlock || !authority.active()) {
      fail(ErrorCode::kAuthorization, "state change needs an active LOCK_UNLOCK capability");
    }
    std::lock_guard lock(mu_);
    locked_ = false;
  }
}

std::size_t Vault::object_count() const {
  std::lock_guard lock(mu_);
  return objects_.size();
}

std::vector<VaultObject> Vault::objects() const {
  std::lock_guard lock(mu_);
  std::vector<VaultObject> out;
  for (const auto& [id, obj] : objects_) out.push_back(obj);
  return out;
}

std::string Vault::inventory_json() const {
  std::lock_guard lock(mu_);
  nlohmann::json objs = nlohmann::json::array();
  for (const auto& [id, obj] : objects_) {
    nlohmann::json holders = nlohmann::json::array();
    for (const CloudNode& c : clouds_) {
      if (c.holdings().count(id)) holders.push_back(c.id());
    }
    objs.push_back({{"object_id", id},
                    {"label", obj.label},
                    {"plaintext_sha256", to_hex(crypto::view(obj.plaintext_digest))},
                    {"ciphertext_sha256", to_hex(crypto::view(obj.ciphertext_digest))},
                    {"plaintext_size", obj.plaintext_size},
                    {"ciphertext_size", obj.ciphertext_size},
                    {"k", obj.k},
                    {"n", obj.n},
                    {"key_threshold", obj.key_threshold},
                    {"created", obj.created},
                    {"clouds", holders}});
  }
  nlohmann::json clouds = nlohmann::json::array();
  for (const CloudNode& c : clouds_) {
    clouds.push_back({{"id", c.id()}, {"fault", to_string(c.fault())}, {"objects", c.object_count()}});
  }
  nlohmann::json j{{"objects", objs}, {"clouds", clouds}};
  return j.dump(2) + "\n";
}

}  // namespace prilok
