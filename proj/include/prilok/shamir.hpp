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

#ifndef PRILOK_SHAMIR_HPP_
#define PRILOK_SHAMIR_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "prilok/bytes.hpp"
#include "prilok/crypto.hpp"

namespace prilok::shamir {

// One share of a byte-wise Shamir sharing over GF(256). x is the evaluation
// point (1..n); y holds one polynomial evaluation per secret byte.
struct Share {
  std::uint8_t x = 0;
  Bytes y;

  friend bool operator==(const Share&, const Share&) = default;
};

// Any `threshold` of the n shares reconstruct the secret; fewer reveal nothing.
// Requires 1 <= threshold <= n <= 255.
std::vector<Share> split_secret(ByteView secret, int threshold, int n, crypto::Drbg& rng);

// Lagrange interpolation at zero over all given shares. Throws kReconstruction
// on duplicated x coordinates, x == 0, or ragged share lengths. Supplying
// fewer shares than the threshold silently yields unrelated bytes.
Bytes reconstruct_secret(std::span<const Share> shares);

Bytes encode_share(const Share& share);
Share decode_share(ByteView bytes);

}  // namespace prilok::shamir

#endif  // PRILOK_SHAMIR_HPP_
