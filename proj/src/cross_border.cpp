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

#include "prilok/cross_border.hpp"

#include <algorithm>

#include "prilok/error.hpp"

namespace prilok {

namespace {

void write_region(ByteWriter& w, const SpaceTimeRegion& region) {
  w.u64(static_cast<std::uint64_t>(region.start)).u64(static_cast<std::uint64_t>(region.end));
  w.u32(static_cast<std::uint32_t>(region.cells.size()));
  for (const BsCode& c : region.cells) w.prefixed(c.code).u8(static_cast<std::uint8_t>(c.precision));
  w.u8(region.coords ? 1 : 0);
  if (region.coords) {
    w.f64(region.coords->min.x).f64(region.coords->min.y);
    w.f64(region.coords->max.x).f64(region.coords->max.y);
  }
}

SpaceTimeRegion read_region(ByteReader& r) {
  SpaceTimeRegion region;
  region.start = static_cast<Minute>(r.u64());
  region.end = static_cast<Minute>(r.u64());
  std::uint32_t n = r.u32();
  if (n > r.remaining()) fail(ErrorCode::kFraming, "cell count exceeds message");
  for (std::uint32_t i = 0; i < n; ++i) {
    BsCode c;
    c.code = r.prefixed_string();
    std::uint8_t p = r.u8();
    if (p > 2) fail(ErrorCode::kFraming, "bad precision class");
    c.precision = static_cast<PrecisionClass>(p);
    region.cells.push_back(std::move(c));
  }
  std::uint8_t has = r.u8();
  if (has > 1) fail(ErrorCode::kFraming, "bad presence flag");
  if (has) {
    BoundingBox b;
    b.min.x = r.f64();
    b.min.y = r.f64();
    b.max.x = r.f64();
    b.max.y = r.f64();
    region.coords = b;
  }
  return region;
}

crypto::Digest binding(const std::string& country, const SpaceTimeRegion& context) {
  ByteWriter w;
  w.prefixed(country);
  write_region(w, context);
  return crypto::sha256(w.bytes());
}

PhoneId open_token(const CrossBorderToken& token, const crypto::BoxSecretKey& key) {
  Bytes plain = crypto::hybrid_decrypt(key, token.ciphertext);
  ByteReader r(plain);
  PhoneId p;
  p.nr = r.prefixed_string();
  p.imei = r.prefixed_string();
  ByteView bound = r.raw(32);
  r.expect_done();
  crypto::Digest expect = binding(token.home_country, token.context);
  const bool matches = std::equal(bound.begin(), bound.end(), expect.begin());
  crypto::wipe(plain);
  if (!matches) {
    fail(ErrorCode::kIntegrity, "token context does not match its ciphertext");
  }
  return p;
}

}  // namespace

CrossBorderToken issue_token(const PhoneId& phone, const crypto::BoxPublicKey& home_key,
                             std::string home_country, SpaceTimeRegion context, crypto::Drbg& rng) {
  validate(phone);
  CrossBorderToken t;
  t.home_country = std::move(home_country);
  t.context = std::move(context);
  ByteWriter w;
  w.prefixed(phone.nr).prefixed(phone.imei).raw(crypto::view(binding(t.home_country, t.context)));
  t.ciphertext = crypto::hybrid_encrypt(home_key, w.bytes(), rng);
  return t;
}

PhoneId redeem_token(const CrossBorderToken& token, std::span<const shamir::Share> shares) {
  Bytes secret = shamir::reconstruct_secret(shares);
  crypto::BoxSecretKey key{};
  if (secret.size() != key.size()) fail(ErrorCode::kDecryption, "shares do not form a key");
  std::copy(secret.begin(), secret.end(), key.begin());
  crypto::wipe(secret);
  try {
    PhoneId p = open_token(token, key);
    crypto::wipe(key);
    return p;
  } catch (...) {
    crypto::wipe(key);
    throw;
  }
}

PhoneId redeem_token(const CrossBorderToken& token, const Capability& capability) {
  return open_token(token, capability.decryption_key(kCrossBorderKeyId));
}

Bytes encode_token(const CrossBorderToken& token) {
  ByteWriter w;
  w.prefixed(token.home_country).prefixed(token.ciphertext);
  write_region(w, token.context);
  return std::move(w).bytes();
}

CrossBorderToken decode_token(ByteView bytes) {
  ByteReader r(bytes);
  CrossBorderToken t;
  t.home_country = r.prefixed_string();
  ByteView ct = r.prefixed();
  t.ciphertext.assign(ct.begin(), ct.end());
  t.context = read_region(r);
  r.expect_done();
  return t;
}

}  // namespace prilok
