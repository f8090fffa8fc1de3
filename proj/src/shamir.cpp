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

#include "prilok/shamir.hpp"

#include <array>
#include <string>

#include "prilok/error.hpp"
#include "prilok/gf256.hpp"

namespace prilok::shamir {

std::vector<Share> split_secret(ByteView secret, int threshold, int n, crypto::Drbg& rng) {
  if (n < 1 || n > 255) fail(ErrorCode::kParameter, "share count must be in 1..255");
  if (threshold < 1 || threshold > n) {
    fail(ErrorCode::kParameter,
         "threshold " + std::to_string(threshold) + " outside 1.." + std::to_string(n));
  }
  std::vector<Share> shares(n);
  for (int i = 0; i < n; ++i) {
    shares[i].x = static_cast<std::uint8_t>(i + 1);
    shares[i].y.resize(secret.size());
  }
  // coeffs[0] is the secret byte; the rest are fresh random per byte.
  Bytes coeffs(threshold);
  for (std::size_t b = 0; b < secret.size(); ++b) {
    coeffs[0] = secret[b];
    if (threshold > 1) rng.fill(std::span(coeffs).subspan(1));
    for (int i = 0; i < n; ++i) {
      // Horner evaluation at x.
      std::uint8_t acc = 0;
      for (int c = threshold - 1; c >= 0; --c) {
        acc = gf256::add(gf256::mul(acc, shares[i].x), coeffs[c]);
      }
      shares[i].y[b] = acc;
    }
  }
  crypto::wipe(coeffs);
  return shares;
}

Bytes reconstruct_secret(std::span<const Share> shares) {
  if (shares.empty()) fail(ErrorCode::kReconstruction, "no shares supplied");
  std::array<bool, 256> seen{};
  const std::size_t len = shares.front().y.size();
  for (const Share& s : shares) {
    if (s.x == 0) fail(ErrorCode::kReconstruction, "share with x = 0");
    if (seen[s.x]) {
      fail(ErrorCode::kReconstruction, "duplicated share index " + std::to_string(s.x));
    }
    seen[s.x] = true;
    if (s.y.size() != len) fail(ErrorCode::kReconstruction, "shares differ in length");
  }
  // Lagrange basis at zero: l_i(0) = prod_{j != i} x_j / (x_j - x_i).
  std::vector<std::uint8_t> basis(shares.size());
  for (std::size_t i = 0; i < shares.size(); ++i) {
    std::uint8_t num = 1;
    std::uint8_t den = 1;
    for (std::size_t j = 0; j < shares.size(); ++j) {
      if (i == j) continue;
      num = gf256::mul(num, shares[j].x);
      den = gf256::mul(den, gf256::add(shares[j].x, shares[i].x));
    }
    basis[i] = gf256::div(num, den);
  }
  Bytes secret(len, 0);
  for (std::size_t b = 0; b < len; ++b) {
    std::uint8_t acc = 0;
    for (std::size_t i = 0; i < shares.size(); ++i) {
      acc = gf256::add(acc, gf256::mul(basis[i], shares[i].y[b]));
    }
    secret[b] = acc;
  }
  return secret;
}

Bytes encode_share(const Share& share) {
  ByteWriter w;
  w.u8(share.x).raw(share.y);
  return std::move(w).bytes();
}

Share decode_share(ByteView bytes) {
  if (bytes.empty()) fail(ErrorCode::kFraming, "empty share");
  if (bytes[0] == 0) fail(ErrorCode::kFraming, "share x must be non-zero");
  Share s;
  s.x = bytes[0];
  s.y.assign(bytes.begin() + 1, bytes.end());
  return s;
}

}  // namespace prilok::shamir
