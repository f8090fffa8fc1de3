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
#include <bit>
#include <set>

#include "doctest.h"
#include "prilok/crypto.hpp"
#include "prilok/error.hpp"
#include "prilok/gf256.hpp"
#include "prilok/shamir.hpp"

using namespace prilok;

namespace {

// Carry-less multiply reduced by x^8 + x^4 + x^3 + x + 1, bit by bit.
std::uint8_t reference_mul(std::uint8_t a, std::uint8_t b) {
  unsigned acc = 0;
  for (int i = 0; i < 8; ++i) {
    if (b & (1u << i)) acc ^= static_cast<unsigned>(a) << i;
  }
  for (int bit = 14; bit >= 8; --bit) {
    if (acc & (1u << bit)) acc ^= 0x11bu << (bit - 8);
  }
  return static_cast<std::uint8_t>(acc);
}

std::vector<shamir::Share> pick(const std::vector<shamir::Share>& all, unsigned mask) {
  std::vector<shamir::Share> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (mask & (1u << i)) out.push_back(all[i]);
  }
  return out;
}

}  // namespace

TEST_CASE("table multiply equals the bitwise reference on all 65536 pairs") {
  for (int a = 0; a < 256; ++a) {
    for (int b = 0; b < 256; ++b) {
      auto x = static_cast<std::uint8_t>(a), y = static_cast<std::uint8_t>(b);
      REQUIRE(gf256::mul(x, y) == reference_mul(x, y));
      REQUIRE(gf256::mul_slow(x, y) == reference_mul(x, y));
    }
  }
}

TEST_CASE("field laws") {
  CHECK(gf256::mul(0x57, 0x83) == 0xc1);  // the worked AES example
  for (int a = 1; a < 256; ++a) {
    auto x = static_cast<std::uint8_t>(a);
    CHECK(gf256::mul(x, gf256::inv(x)) == 1);
    CHECK(gf256::div(gf256::mul(x, 0x1d), x) == 0x1d);
  }
  for (int a = 0; a < 256; a += 17) {
    for (int b = 0; b < 256; b += 13) {
      for (int c = 0; c < 256; c += 29) {
        auto x = static_cast<std::uint8_t>(a), y = static_cast<std::uint8_t>(b), z = static_cast<std::uint8_t>(c);
        CHECK(gf256::mul(x, gf256::add(y, z)) == gf256::add(gf256::mul(x, y), gf256::mul(x, z)));
      }
    }
  }
}

TEST_CASE("any t of n shares reconstruct, fewer do not") {
  crypto::Drbg rng(9);
  Bytes secret = rng.bytes(32);
  for (auto [t, n] : {std::pair{2, 3}, std::pair{3, 5}, std::pair{3, 4}, std::pair{5, 7}}) {
    auto shares = shamir::split_secret(secret, t, n, rng);
    REQUIRE(shares.size() == static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) CHECK(shares[static_cast<std::size_t>(i)].x == i + 1);
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      auto subset = pick(shares, mask);
      Bytes got = shamir::reconstruct_secret(subset);
      if (std::popcount(mask) >= t) {
        CHECK(got == secret);
      } else {
        CHECK(got != secret);
      }
    }
  }
}

TEST_CASE("below threshold every candidate secret stays consistent") {
  // With t = 2, one share of a one-byte secret is consistent with all 256
  // secrets: for each s there is exactly one slope producing y.
  crypto::Drbg rng(10);
  auto shares = shamir::split_secret(Bytes{0x42}, 2, 3, rng);
  const auto& s1 = shares[0];
  std::set<int> slopes;
  for (int s = 0; s < 256; ++s) {
    for (int a = 0; a < 256; ++a) {
      if ((s ^ gf256::mul(static_cast<std::uint8_t>(a), s1.x)) == s1.y[0]) slopes.insert(s);
    }
  }
  CHECK(slopes.size() == 256);
}

TEST_CASE("split is deterministic under the seed and validates parameters") {
  crypto::Drbg a(5), b(5);
  Bytes secret{1, 2, 3};
  CHECK(shamir::split_secret(secret, 2, 4, a) == shamir::split_secret(secret, 2, 4, b));
  crypto::Drbg rng(6);
  CHECK_THROWS_AS(shamir::split_secret(secret, 0, 4, rng), Error);
  CHECK_THROWS_AS(shamir::split_secret(secret, 5, 4, rng), Error);
  CHECK_THROWS_AS(shamir::split_secret(secret, 2, 256, rng), Error);
  CHECK_THROWS_AS(shamir::reconstruct_secret(std::vector<shamir::Share>{}), Error);
}

TEST_CASE("duplicate share points are rejected") {
  crypto::Drbg rng(7);
  auto shares = shamir::split_secret(Bytes{9, 9}, 2, 3, rng);
  std::vector<shamir::Share> dup{shares[0], shares[0]};
  CHECK_THROWS_AS(shamir::reconstruct_secret(dup), Error);
}

TEST_CASE("share wire format round trips") {
  crypto::Drbg rng(8);
  auto shares = shamir::split_secret(rng.bytes(32), 3, 5, rng);
  for (const auto& s : shares) CHECK(shamir::decode_share(shamir::encode_share(s)) == s);
  CHECK(shamir::encode_share(shares[1]).front() == 2);
  CHECK_THROWS_AS(shamir::decode_share(Bytes{}), Error);
  Bytes at_zero = shamir::encode_share(shares[0]);
  at_zero[0] = 0;  // the secret's own evaluation point
  CHECK_THROWS_AS(shamir::decode_share(at_zero), Error);
}
