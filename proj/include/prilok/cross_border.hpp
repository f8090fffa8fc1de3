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

// Phone-identifying tokens exchanged between national federations. A token is
// the phone id encrypted under the home federation's threshold key; only a
// quorum of that federation can open it.

#ifndef PRILOK_CROSS_BORDER_HPP_
#define PRILOK_CROSS_BORDER_HPP_

#include <span>
#include <string>

#include "prilok/cep_types.hpp"
#include "prilok/crypto.hpp"
#include "prilok/federation.hpp"
#include "prilok/shamir.hpp"

namespace prilok {

inline const std::string kCrossBorderKeyId = "cross-border";

struct CrossBorderToken {
  Bytes ciphertext;
  std::string home_country;  // ISO 3166 alpha-2
  SpaceTimeRegion context;
};

// The ciphertext also binds the country and context, so neither can be
// swapped onto another token.
CrossBorderToken issue_token(const PhoneId& phone, const crypto::BoxPublicKey& home_key,
                             std::string home_country, SpaceTimeRegion context, crypto::Drbg& rng);

// Throws kDecryption when the shares do not reconstruct the home key (too few,
// or from another federation), kReconstruction when they are inconsistent.
PhoneId redeem_token(const CrossBorderToken& token, std::span<const shamir::Share> shares);
// Redeem with a FULL_PROCESSING capability of the home federation.
PhoneId redeem_token(const CrossBorderToken& token, const Capability& capability);

Bytes encode_token(const CrossBorderToken& token);
CrossBorderToken decode_token(ByteView bytes);

}  // namespace prilok

#endif  // PRILOK_CROSS_BORDER_HPP_
