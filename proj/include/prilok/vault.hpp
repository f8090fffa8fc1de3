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

// Data vault spread over n mutually distrusting clouds. Each object is sealed
// under a fresh key, Reed-Solomon coded into n fragments (any k rebuild the
// ciphertext) and its key Shamir-split (any key_threshold shares rebuild it).
// Fragment i and share i go to cloud i.

#ifndef PRILOK_VAULT_HPP_
#define PRILOK_VAULT_HPP_

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "prilok/crypto.hpp"
#include "prilok/erasure.hpp"
#include "prilok/execution.hpp"
#include "prilok/federation.hpp"
#include "prilok/scenario.hpp"
#include "prilok/shamir.hpp"

namespace prilok {

enum class CloudFault { kHonest, kCrashed, kByzantine };

std::string_view to_string(CloudFault f);

struct StoredFragment {
  std::string object_id;  // 32 hex chars (16 bytes on the wire)
  erasure::Fragment fragment;
  shamir::Share key_share;

  friend bool operator==(const StoredFragment&, const StoredFragment&) = default;
};

// object-id (16) || fragment index (1) || len-prefixed fragment
//   || len-prefixed key share (x || y)
Bytes encode_fragment_message(const StoredFragment& fragment);
StoredFragment decode_fragment_message(ByteView bytes);

class CloudNode {
 public:
  explicit CloudNode(int id) : id_(id) {}

  int id() const { return id_; }
  CloudFault fault() const { return fault_; }
  void set_fault(CloudFault f) { fault_ = f; }

  // Returns false (no ack) when crashed.
  bool store(const StoredFragment& fragment);
  // nullopt when crashed or unknown. A Byzantine node returns a corrupted
  // fragment and share.
  std::optional<StoredFragment> fetch(const std::string& object_id) const;
  // Overwrites with zeros, then drops. Returns whether anything was held.
  bool erase(const std::string& object_id);

  std::size_t object_count() const { return held_.size(); }
  // What the node's operator can see: the bytes it actually holds.
  const std::map<std::string, StoredFragment>& holdings() const { return held_; }

 private:
  int id_;
  CloudFault fault_ = CloudFault::kHonest;
  std::map<std::string, StoredFragment> held_;
};

struct VaultObject {
  std::string object_id;
  std::string label;
  crypto::Digest plaintext_digest{};
  crypto::Digest ciphertext_digest{};
  std::size_t plaintext_size = 0;
  std::size_t ciphertext_size = 0;
  int k = 0;
  int n = 0;
  int key_threshold = 0;
  Minute created = 0;
};

struct DeletionProof {
  std::vector<std::string> object_ids;
  std::vector<int> clouds_erased;  // clouds that confirmed the overwrite
  Minute minute = 0;
  crypto::Digest digest{};  // sha256 over the sorted ids and the minute
};

class Vault : public StateListener {
 public:
  Vault(const VaultConfig& config, Federation& federation, crypto::Drbg rng,
        Execution exec = Execution::kParallel);

  const VaultConfig& config() const { return config_; }

  // Needs the Write right and the Alert state. Throws kLocked, kAuthorization,
  // kWriteFailure (fewer than max(k, key_threshold) clouds acked; nothing
  // stays behind).
  std::string write(const Capability& capability, ByteView plaintext, Minute now,
                    const std::string& label = "");
  // Needs Decrypt. Throws kUnavailable, kIntegrity.
  Bytes read(const Capability& capability, const std::string& object_id) const;
  // Needs ReadEncrypted; returns the sealed ciphertext.
  Bytes read_encrypted(const Capability& capability, const std::string& object_id) const;
  // Needs Delete. Throws kUnknownObject.
  DeletionProof remove(const Capability& capability, const std::string& object_id, Minute now);
  DeletionProof remove_all(const Capability& capability, Minute now);

  bool locked() const;
  void on_state_change(SystemStateKind state, const Capability& authority, Minute now) override;

  CloudNode& cloud(int id);
  const CloudNode& cloud(int id) const;
  std::size_t object_count() const;
  std::vector<VaultObject> objects() const;
  // Inventory for audits: object metadata plus which clouds hold a piece.
  std::string inventory_json() const;

 private:
  const VaultObject& object(const std::string& object_id) const;
  std::vector<StoredFragment> gather(const std::string& object_id) const;
  Bytes decode_ciphertext(const VaultObject& obj, const std::vector<StoredFragment>& pieces) const;
  DeletionProof erase_objects(std::vector<std::string> ids, Minute now);

  VaultConfig config_;
  Federation& federation_;
  mutable crypto::Drbg rng_;
  Execution exec_;
  erasure::ReedSolomon rs_;
  std::vector<CloudNode> clouds_;
  std::map<std::string, VaultObject> objects_;
  bool locked_ = true;
  mutable std::mutex mu_;
};

}  // namespace prilok

#endif  // PRILOK_VAULT_HPP_
