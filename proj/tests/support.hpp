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


// Shared fixtures for the module tests.

#ifndef PRILOK_TESTS_SUPPORT_HPP_
#define PRILOK_TESTS_SUPPORT_HPP_

#include <functional>
#include <string>
#include <vector>

#include "doctest.h"
#include "prilok/error.hpp"
#include "prilok/federation.hpp"
#include "prilok/world.hpp"

namespace testing {

using namespace prilok;

inline FederationConfig small_federation() {
  FederationConfig c;
  c.n = 5;
  c.f = 2;
  c.q_read = 3;
  c.q_critical = 3;
  return c;
}

// A federation with helpers that run honest quorums.
struct Rig {
  explicit Rig(std::uint64_t seed = 1, FederationConfig c = small_federation())
      : rng(seed), fed(c, rng, ledger) {}

  QuorumCertificate certify(OperationClass op, Minute now = 0) {
    RequestPayload payload = op == OperationClass::kLockUnlock
                                 ? RequestPayload(LockUnlockPayload{SystemStateKind::kAlert})
                                 : RequestPayload(AccessPayload{"test", std::nullopt, std::nullopt});
    auto c = run_quorum(fed, 1, op, payload, now, rng);
    REQUIRE(c.has_value());
    return *c;
  }
  void to(SystemStateKind s, Minute now = 0) {
    auto c = run_quorum(fed, 1, OperationClass::kLockUnlock, LockUnlockPayload{s}, now, rng);
    REQUIRE(c.has_value());
    fed.change_state(*c, s, now);
  }
  Capability capability(OperationClass op, Minute now = 0) {
    return fed.authorize_mode(certify(op, now), op, now);
  }

  crypto::Drbg rng;
  Ledger ledger;
  Federation fed;
};

inline ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvariant;
}

inline PhoneId phone(int i) {
  char nr[16], imei[16];
  std::snprintf(nr, sizeof nr, "3511%08d", i);
  std::snprintf(imei, sizeof imei, "35%013d", i);
  return make_phone_id(nr, imei);
}

inline BsCode station(int i, PrecisionClass pc = PrecisionClass::kFemto) {
  return make_bs_code(to_bytes("test-provider-key"), 0, i, pc);
}

// Every record of the whole observation period.
inline std::vector<Pdr> observe_all(const World& world, const ScenarioConfig& config) {
  ObservationModel model = observation_model(config);
  std::vector<Pdr> out;
  for (Minute m = 0; m < world.duration; ++m) {
    std::vector<Pdr> batch = observe(world.registry, world.traces, m, model);
    out.insert(out.end(), batch.begin(), batch.end());
  }
  return out;
}

}  // namespace testing

#endif  // PRILOK_TESTS_SUPPORT_HPP_
