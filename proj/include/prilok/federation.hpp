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

// The entrusted-authority federation: n authorities, each critical request
// must gather q distinct signed approvals (q per operation class) before it
// becomes a QuorumCertificate. Certificates drive the Passive/Alert state
// machine and mint Capabilities, the only way to touch stored data. Every
// issuance, denial, state change and key reconstruction is ledger-logged.

#ifndef PRILOK_FEDERATION_HPP_
#define PRILOK_FEDERATION_HPP_

#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "prilok/crypto.hpp"
#include "prilok/ledger.hpp"
#include "prilok/modes.hpp"
#include "prilok/pdr.hpp"
#include "prilok/scenario.hpp"
#include "prilok/shamir.hpp"

namespace prilok {

struct LockUnlockPayload {
  SystemStateKind target = SystemStateKind::kAlert;

  friend bool operator==(const LockUnlockPayload&, const LockUnlockPayload&) = default;
};

struct AccessPayload {
  std::string purpose;
  std::optional<PhoneId> phone;
  std::optional<Minute> t_inf_min;

  friend bool operator==(const AccessPayload&, const AccessPayload&) = default;
};

// LOCK_UNLOCK requests carry a LockUnlockPayload; every other class an
// AccessPayload.
using RequestPayload = std::variant<LockUnlockPayload, AccessPayload>;

struct WorkflowRequest {
  std::string request_id;  // 32 lowercase hex chars
  OperationClass op = OperationClass::kBlindAnalysis;
  RequestPayload payload;
  int requester = 0;
  Minute submitted_at = 0;
  crypto::Signature signature{};

  friend bool operator==(const WorkflowRequest&, const WorkflowRequest&) = default;
};

// Everything but the signature, in canonical framing.
Bytes request_body(const WorkflowRequest& request);
crypto::Digest request_hash(const WorkflowRequest& request);
// What an approving authority signs: request_id || request hash.
Bytes approval_message(const std::string& request_id, const crypto::Digest& hash);

struct Approval {
  int authority = 0;
  crypto::Signature signature{};

  friend bool operator==(const Approval&, const Approval&) = default;
};

struct Vote {
  std::string request_id;
  int authority = 0;
  crypto::Digest request_hash{};
  crypto::Signature signature{};

  friend bool operator==(const Vote&, const Vote&) = default;
};

struct QuorumCertificate {
  WorkflowRequest request;
  crypto::Digest request_hash{};
  std::vector<Approval> approvals;  // sorted by authority id
  int required_q = 0;

  const std::string& request_id() const { return request.request_id; }
  OperationClass op() const { return request.op; }
  friend bool operator==(const QuorumCertificate&, const QuorumCertificate&) = default;
};

enum class AuthorityBehavior {
  kHonest,
  kSilent,        // never votes
  kEquivocating,  // signs a hash other than the request's
};

class Authority {
 public:
  Authority(int id, crypto::Drbg& rng);

  int id() const { return id_; }
  const crypto::SigningPublicKey& public_key() const { return keys_.public_key; }
  AuthorityBehavior behavior() const { return behavior_; }
  void set_behavior(AuthorityBehavior b) { behavior_ = b; }

  WorkflowRequest make_request(OperationClass op, RequestPayload payload, Minute now,
                               crypto::Drbg& rng) const;
  // nullopt for a silent authority.
  std::optional<Vote> vote(const WorkflowRequest& request) const;
  crypto::Signature sign(ByteView message) const { return crypto::sign(keys_, message); }

  void hold_share(const std::string& key_id, shamir::Share share);
  const shamir::Share* share(const std::string& key_id) const;

 private:
  int id_;
  crypto::SigningKeyPair keys_;
  AuthorityBehavior behavior_ = AuthorityBehavior::kHonest;
  std::map<std::string, shamir::Share> shares_;
};

struct SystemState {
  SystemStateKind state = SystemStateKind::kPassive;
  std::optional<Minute> alert_started;
  std::uint64_t epoch = 0;  // bumps on every transition
};

enum Right : unsigned {
  kRightWrite = 1u << 0,
  kRightReadEncrypted = 1u << 1,
  kRightWriteEncrypted = 1u << 2,
  kRightDecrypt = 1u << 3,
  kRightResolve = 1u << 4,  // map BsCode -> coordinates
  kRightDelete = 1u << 5,
};

unsigned rights_for(OperationClass op);

class Federation;

// Proof that a quorum authorised one class of operation. Only the federation
// mints these; they lapse as soon as the system leaves the Alert epoch they
// were issued in.
class Capability {
 public:
  OperationClass op() const { return op_; }
  const std::string& request_id() const { return request_id_; }
  bool allows(unsigned rights) const { return (rights_ & rights) == rights; }
  bool active() const;
  // Throws kLocked when the epoch has lapsed, kAuthorization when a right is
  // missing.
  void require(unsigned rights, std::string_view operation) const;
  // Present only for FULL_PROCESSING; throws kAuthorization otherwise.
  const crypto::BoxSecretKey& decryption_key(const std::string& key_id) const;
  bool has_key(const std::string& key_id) const;

 private:
  friend class Federation;
  struct KeyBag {
    std::map<std::string, crypto::BoxSecretKey> keys;
    ~KeyBag();
  };

  Capability(OperationClass op, std::string request_id, unsigned rights,
             std::shared_ptr<const SystemState> state, std::uint64_t epoch,
             std::shared_ptr<const KeyBag> keys)
      : op_(op), request_id_(std::move(request_id)), rights_(rights), state_(std::move(state)),
        epoch_(epoch), keys_(std::move(keys)) {}

  OperationClass op_;
  std::string request_id_;
  unsigned rights_;
  std::shared_ptr<const SystemState> state_;
  std::uint64_t epoch_;
  std::shared_ptr<const KeyBag> keys_;
};

class StateListener {
 public:
  virtual ~StateListener() = default;
  // `authority` is a LOCK_UNLOCK capability valid for the new epoch.
  virtual void on_state_change(SystemStateKind state, const Capability& authority,
                               Minute now) = 0;
};

class Federation {
 public:
  Federation(const FederationConfig& config, crypto::Drbg& rng, Ledger& ledger);

  const FederationConfig& config() const { return config_; }
  int n() const { return static_cast<int>(authorities_.size()); }
  int quorum(OperationClass op) const { return config_.quorum(op); }
  Authority& authority(int id);
  const Authority& authority(int id) const;
  Ledger& ledger() { return ledger_; }

  // Generates an X25519 keypair, splits the secret over all authorities with
  // threshold q(FULL_PROCESSING) and forgets it. Returns the public half.
  crypto::BoxPublicKey create_threshold_key(const std::string& key_id);
  const crypto::BoxPublicKey& public_key(const std::string& key_id) const;
  std::vector<std::string> key_ids() const;

  // --- workflow ------------------------------------------------------------

  // Throws kUnknownAuthority / kMalformedSignature / kValidation.
  void submit_request(const WorkflowRequest& request);
  // Applies one vote. Emits the certificate exactly once, when the q-th
  // distinct valid approval arrives; later votes return nullopt. Throws
  // kUnknownRequest, kUnknownAuthority, kDuplicateVote, kMalformedSignature.
  std::optional<QuorumCertificate> approve(const Vote& vote);
  // Convenience: authority `id` casts its (behaviour-dependent) vote.
  std::optional<QuorumCertificate> approve(int authority_id, const std::string& request_id);
  // Pending requests older than the vote window become ledger-logged denials.
  std::vector<std::string> expire(Minute now);
  bool is_pending(const std::string& request_id) const;

  // Structural and cryptographic check, no side effects.
  bool verify(const QuorumCertificate& cert) const;
  // Verifies and checks the class; logs an access-denied entry and throws
  // kAuthorization / kWrongClass on failure.
  void require(const QuorumCertificate& cert, std::initializer_list<OperationClass> allowed,
               std::string_view operation, Minute now);

  // --- state machine -------------------------------------------------------

  const SystemState& state() const { return *state_; }
  bool alert() const { return state_->state == SystemStateKind::kAlert; }
  void add_listener(StateListener* listener);
  SystemState change_state(const QuorumCertificate& cert, SystemStateKind target, Minute now);

  // --- operation modes -----------------------------------------------------

  // Each certificate may be exercised once. FULL_PROCESSING reconstructs every
  // threshold key from the approving authorities' shares.
  Capability authorize_mode(const QuorumCertificate& cert, OperationClass op, Minute now);

  // Reconstructs key `key_id` from the shares of `authority_ids`; throws
  // kReconstruction if no subset reproduces the registered public key.
  crypto::BoxSecretKey reconstruct_key(const std::string& key_id,
                                       const std::vector<int>& authority_ids, Minute now,
                                       const std::string& request_id);

 private:
  struct Pending {
    WorkflowRequest request;
    crypto::Digest hash{};
    std::map<int, Approval> approvals;
    std::set<int> voted;
    bool certified = false;
  };

  Capability mint(OperationClass op, const std::string& request_id, unsigned rights,
                  std::shared_ptr<const Capability::KeyBag> keys) const;
  void consume(const QuorumCertificate& cert, Minute now);

  FederationConfig config_;
  crypto::Drbg rng_;
  Ledger& ledger_;
  std::vector<Authority> authorities_;
  std::map<std::string, Pending> pending_;
  std::set<std::string> consumed_;
  std::map<std::string, crypto::BoxPublicKey> public_keys_;
  std::shared_ptr<SystemState> state_;
  std::vector<StateListener*> listeners_;
};

// Submits a request from `requester` and delivers every authority's vote in
// an order shuffled by `rng`. Returns the certificate if one was issued;
// otherwise the request stays pending until expire() denies it.
std::optional<QuorumCertificate> run_quorum(Federation& federation, int requester,
                                            OperationClass op, RequestPayload payload,
                                            Minute now, crypto::Drbg& rng);

// Wire framing for votes, requests and certificates.
Bytes encode_request(const WorkflowRequest& request);
WorkflowRequest decode_request(ByteView bytes);
Bytes encode_vote(const Vote& vote);
Vote decode_vote(ByteView bytes);
Bytes encode_certificate(const QuorumCertificate& cert);
QuorumCertificate decode_certificate(ByteView bytes);

}  // namespace prilok

#endif  // PRILOK_FEDERATION_HPP_
