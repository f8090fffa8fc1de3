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


#include <algorithm>

#include "doctest.h"
#include "prilok/edge_cloud.hpp"
#include "support.hpp"

using namespace prilok;
using testing::code_of;
using testing::phone;
using testing::Rig;
using testing::station;

namespace {

PdrSet set_at(Minute m, int bs = 1, int phones = 3) {
  PdrSet s{m, station(bs), {}};
  for (int i = 0; i < phones; ++i) s.records.push_back(make_pdr(s.bs, phone(i), {1.0 + i, 0.5}, m));
  return s;
}

PrecisionLookup femto() {
  return [](std::string_view) { return PrecisionClass::kFemto; };
}

struct EdgeRig : Rig {
  EdgeRig() {
    fed.create_threshold_key("p0");
    fed.add_listener(&edge);
  }
  EdgeCloud edge{0, "p0", fed, 100, crypto::Drbg(7)};
};

}  // namespace

TEST_CASE("pushes are stored encrypted in arrival order") {
  EdgeRig r;
  ProviderPort port = r.edge.provider_port();
  for (Minute m : {5, 3, 9}) CHECK(port.push(set_at(m)));
  auto snap = r.edge.storage_snapshot();
  REQUIRE(snap.size() == 3);
  CHECK(snap[0].minute == 5);
  CHECK(snap[1].minute == 3);
  CHECK(snap[2].minute == 9);
  CHECK(r.edge.metrics().pushed == 3);
}

TEST_CASE("no plaintext identifier survives in 1000 stored sets") {
  EdgeRig r;
  for (Minute m = 0; m < 1000; ++m) r.edge.push(set_at(m, 1 + m % 4, 4));
  int hits = 0;
  for (const auto& e : r.edge.storage_snapshot()) {
    std::string_view ct(reinterpret_cast<const char*>(e.ciphertext.data()), e.ciphertext.size());
    for (int i = 0; i < 4; ++i) {
      hits += ct.find(phone(i).nr) != std::string_view::npos;
      hits += ct.find(phone(i).imei) != std::string_view::npos;
    }
  }
  CHECK(hits == 0);
}

TEST_CASE("encryption failure drops the set and counts it") {
  EdgeRig r;
  crypto::BoxPublicKey zero{};
  CHECK_FALSE(r.edge.push(set_at(1), zero));
  CHECK(r.edge.size() == 0);
  CHECK(r.edge.metrics().dropped == 1);
}

TEST_CASE("prune removes exactly the entries older than the ttl and zeroes them") {
  EdgeRig r;
  for (Minute m = 0; m <= 300; m += 10) r.edge.push(set_at(m));
  CHECK(r.edge.prune(50) == 0);  // now < ttl
  std::size_t removed = r.edge.prune(250);
  CHECK(removed == 15);  // minutes 0..140
  CHECK(*r.edge.oldest_age(250) == 100);
  for (const auto& e : r.edge.storage_snapshot()) CHECK(250 - e.minute <= 100);
  auto audit = r.edge.audit_trail();
  CHECK(audit.size() == 15);
  for (const auto& a : audit) {
    CHECK(a.zeroed);
    CHECK(a.bytes_overwritten > 0);
    CHECK(250 - a.entry_minute > 100);
  }
  CHECK(r.ledger.count(LedgerKind::kPrune) == 1);
}

TEST_CASE("pruning bound holds after every tick (property)") {
  EdgeRig r;
  crypto::Drbg rng(5);
  Minute now = 0;
  for (int tick = 0; tick < 50; ++tick) {
    int pushes = static_cast<int>(rng.next_u64() % 20);
    for (int i = 0; i < pushes; ++i) r.edge.push(set_at(now + static_cast<Minute>(rng.next_u64() % 30), 1, 1));
    now += static_cast<Minute>(rng.next_u64() % 60);
    r.edge.prune(now);
    auto age = r.edge.oldest_age(now);
    if (age) CHECK(*age <= 100);
  }
}

TEST_CASE("fetch is refused while locked and without a valid certificate") {
  EdgeRig r;
  r.edge.push(set_at(1));
  auto cert = r.certify(OperationClass::kBlindAnalysis);
  CHECK(r.edge.locked_for_vpn());
  CHECK(code_of([&] { r.edge.vpn_fetch(cert, {0, 10}, 0); }) == ErrorCode::kLockedCloud);
  r.to(SystemStateKind::kAlert);
  CHECK_FALSE(r.edge.locked_for_vpn());
  auto forged = cert;
  forged.approvals.pop_back();
  CHECK(code_of([&] { r.edge.vpn_fetch(forged, {0, 10}, 0); }) == ErrorCode::kAuthorization);
  auto lock = r.certify(OperationClass::kLockUnlock);
  CHECK(code_of([&] { r.edge.vpn_fetch(lock, {0, 10}, 0); }) == ErrorCode::kWrongClass);
  CHECK(r.edge.metrics().denied_fetches == 3);
  CHECK(r.ledger.count(LedgerKind::kAccessDenied) == 3);
  auto sets = r.edge.vpn_fetch(cert, {0, 10}, 0);
  CHECK(sets.size() == 1);
  CHECK(r.ledger.count(LedgerKind::kEdgeFetch) == 1);
}

TEST_CASE("fetch filters by range and cells; decryption needs the released key") {
  EdgeRig r;
  for (Minute m = 0; m < 10; ++m) r.edge.push(set_at(m, 1 + m % 2));
  r.to(SystemStateKind::kAlert);
  auto cert = r.certify(OperationClass::kBlindAnalysis);
  auto some = r.edge.vpn_fetch(cert, {2, 6}, 0, {station(1).code});
  CHECK(some.size() == 3);  // even minutes went to station 1
  for (const auto& e : some) {
    CHECK(e.bs_code_hint == station(1));
    CHECK((e.minute >= 2 && e.minute <= 6));
  }
  Capability cap = r.capability(OperationClass::kFullProcessing);
  for (const auto& e : some) {
    PdrSet s = decrypt_pdr_set(e, cap.decryption_key("p0"), femto());
    CHECK(s.minute == e.minute);
    CHECK(s.records.size() == 3);
  }
  EncryptedPdrSet lie = some[0];
  lie.minute += 1;
  CHECK(code_of([&] { decrypt_pdr_set(lie, cap.decryption_key("p0"), femto()); }) == ErrorCode::kIntegrity);
}

TEST_CASE("fetch wire round trip") {
  EdgeRig r;
  for (Minute m = 0; m < 4; ++m) r.edge.push(set_at(m));
  r.to(SystemStateKind::kAlert);
  FetchRequest q{r.certify(OperationClass::kBlindAnalysis), {1, 2}, {station(1).code}};
  FetchRequest q2 = decode_fetch_request(encode_fetch_request(q));
  CHECK(q2.certificate == q.certificate);
  CHECK(q2.range.first == 1);
  CHECK(q2.range.last == 2);
  CHECK(q2.cells == q.cells);
  FetchResponse resp = decode_fetch_response(r.edge.handle_fetch(encode_fetch_request(q), 0));
  CHECK(resp.sets.size() == 2);
  Bytes bad = encode_fetch_response(resp);
  bad.resize(bad.size() - 3);
  CHECK(code_of([&] { decode_fetch_response(bad); }) == ErrorCode::kFraming);
}

TEST_CASE("returning to passive relocks the cloud") {
  EdgeRig r;
  r.to(SystemStateKind::kAlert);
  auto cert = r.certify(OperationClass::kBlindAnalysis);
  r.to(SystemStateKind::kPassive);
  CHECK(r.edge.locked_for_vpn());
  CHECK(code_of([&] { r.edge.vpn_fetch(cert, {0, 10}, 0); }) == ErrorCode::kLockedCloud);
}
