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

// Per-provider edge secure cloud. Providers get a ProviderPort, which can
// only push; reads go through vpn_fetch and need an Alert-state quorum
// certificate.

#ifndef PRILOK_EDGE_CLOUD_HPP_
#define PRILOK_EDGE_CLOUD_HPP_

#include <cstddef>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "prilok/crypto.hpp"
#include "prilok/federation.hpp"
#include "prilok/pdr.hpp"

namespace prilok {

struct EncryptedPdrSet {
  Bytes ciphertext;  // hybrid encryption of serialize_pdr_set
  Minute minute = 0;
  BsCode bs_code_hint;

  friend bool operator==(const EncryptedPdrSet&, const EncryptedPdrSet&) = default;
};

// Inclusive on both ends.
struct MinuteRange {
  Minute first = 0;
  Minute last = 0;

  bool contains(Minute m) const { return m >= first && m <= last; }
};

struct PruneRecord {
  Minute now = 0;
  Minute entry_minute = 0;
  std::string bs_code;
  std::size_t bytes_overwritten = 0;
  bool zeroed = false;  // verified all-zero before removal
};

struct EdgeMetrics {
  std::size_t pushed = 0;
  std::size_t dropped = 0;  // encryption failures
  std::size_t pruned = 0;
  std::size_t fetches = 0;
  std::size_t denied_fetches = 0;
};

struct FetchRequest {
  QuorumCertificate certificate;
  MinuteRange range;
  std::vector<std::string> cells;  // empty: every cell
};

struct FetchResponse {
  std::vector<EncryptedPdrSet> sets;
};

Bytes encode_fetch_request(const FetchRequest& request);
FetchRequest decode_fetch_request(ByteView bytes);
Bytes encode_fetch_response(const FetchResponse& response);
FetchResponse decode_fetch_response(ByteView bytes);

Bytes encrypt_pdr_set(const PdrSet& set, const crypto::BoxPublicKey& key, crypto::Drbg& rng);
PdrSet decrypt_pdr_set(const EncryptedPdrSet& entry, const crypto::BoxSecretKey& key,
                       const PrecisionLookup& precision_of);

class EdgeCloud;

// The provider's whole view of its edge cloud.
class ProviderPort {
 public:
  // Returns false when the set was dropped.
  bool push(const PdrSet& set);

 private:
  friend class EdgeCloud;
  explicit ProviderPort(EdgeCloud* cloud) : cloud_(cloud) {}
  EdgeCloud* cloud_;
};

class EdgeCloud : public StateListener {
 public:
  // `key_id` names the federation threshold key this cloud encrypts under.
  EdgeCloud(int provider, std::string key_id, Federation& federation, Minute pdr_ttl,
            crypto::Drbg rng);

  int provider() const { return provider_; }
  const std::string& key_id() const { return key_id_; }
  Minute pdr_ttl() const { return pdr_ttl_; }

  ProviderPort provider_port() { return ProviderPort(this); }

  // Encrypts under the federation key; an encryption failure drops the set
  // and counts it. Returns false when dropped.
  bool push(const PdrSet& set);
  bool push(const PdrSet& set, const crypto::BoxPublicKey& federation_key);

  // Zero-overwrites, then removes, every entry with now - minute > pdr_ttl.
  std::size_t prune(Minute now);
  // Largest now - minute over stored entries; nullopt when empty.
  std::optional<Minute> oldest_age(Minute now) const;

  // Throws kLockedCloud in Passive, kAuthorization / kWrongClass for a bad
  // certificate. Accepts BLIND_ANALYSIS, BLIND_PROCESSING, FULL_PROCESSING.
  std::vector<EncryptedPdrSet> vpn_fetch(const QuorumCertificate& cert, MinuteRange range,
                                         Minute now, const std::vector<std::string>& cells = {});
  Bytes handle_fetch(ByteView request, Minute now);

  bool locked_for_vpn() const;
  void on_state_change(SystemStateKind state, const Capability& authority, Minute now) override;

  std::size_t size() const;
  EdgeMetrics metrics() const;
  std::vector<PruneRecord> audit_trail() const;
  // Snapshot of the ciphertext store, for audits and confidentiality tests.
  // Not reachable through ProviderPort.
  std::vector<EncryptedPdrSet> storage_snapshot() const;

 private:
  int provider_;
  std::string key_id_;
  Federation& federation_;
  Minute pdr_ttl_;
  crypto::Drbg rng_;
  mutable std::mutex mu_;
  std::vector<EncryptedPdrSet> store_;
  bool locked_ = true;
  EdgeMetrics metrics_;
  std::vector<PruneRecord> audit_;
};

}  // namespace prilok

#endif  // PRILOK_EDGE_CLOUD_HPP_
