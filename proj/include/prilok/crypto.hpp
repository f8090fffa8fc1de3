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

// Thin wrappers over libsodium. Primitives are fixed repo-wide:
//   hash       SHA-256
//   PRF        HMAC-SHA-256
//   signature  Ed25519 (deterministic)
//   hybrid     X25519 ephemeral-static + XChaCha20-Poly1305
//   symmetric  XChaCha20-Poly1305
// All randomness is drawn from a seeded Drbg so whole runs are reproducible.

#ifndef PRILOK_CRYPTO_HPP_
#define PRILOK_CRYPTO_HPP_

#include <array>
#include <cstdint>

#include "prilok/bytes.hpp"

namespace prilok::crypto {

using Digest = std::array<std::uint8_t, 32>;
using SymmetricKey = std::array<std::uint8_t, 32>;

Digest sha256(ByteView data);
Digest hmac_sha256(ByteView key, ByteView message);

inline ByteView view(const Digest& d) { return {d.data(), d.size()}; }

// Deterministic random bit generator. Each draw re-keys a ChaCha20 stream
// from (seed, counter), so the sequence depends only on the seed.
class Drbg {
 public:
  explicit Drbg(std::uint64_t seed);
  explicit Drbg(const Digest& seed) : seed_(seed) {}

  void fill(std::span<std::uint8_t> out);
  Bytes bytes(std::size_t n);
  SymmetricKey key();
  std::uint64_t next_u64();
  // Independent child generator; the parent advances by one draw.
  Drbg fork();

 private:
  Digest seed_;
  std::uint64_t counter_ = 0;
};

struct SigningKeyPair {
  std::array<std::uint8_t, 32> public_key{};
  std::array<std::uint8_t, 64> secret_key{};
};

using Signature = std::array<std::uint8_t, 64>;
using SigningPublicKey = std::array<std::uint8_t, 32>;

SigningKeyPair signing_keypair(Drbg& rng);
Signature sign(const SigningKeyPair& keys, ByteView message);
bool verify(const SigningPublicKey& public_key, ByteView message, const Signature& signature);

struct BoxKeyPair {
  std::array<std::uint8_t, 32> public_key{};
  std::array<std::uint8_t, 32> secret_key{};
};

using BoxPublicKey = std::array<std::uint8_t, 32>;
using BoxSecretKey = std::array<std::uint8_t, 32>;

BoxKeyPair box_keypair(Drbg& rng);
BoxPublicKey box_public_from_secret(const BoxSecretKey& secret);

// Layout: ephemeral public key (32) || nonce (24) || AEAD ciphertext.
Bytes hybrid_encrypt(const BoxPublicKey& recipient, ByteView plaintext, Drbg& rng);
// Throws Error(kDecryption) when the key is wrong or the bytes were altered.
Bytes hybrid_decrypt(const BoxSecretKey& secret, ByteView ciphertext);

// Layout: nonce (24) || AEAD ciphertext.
Bytes seal(const SymmetricKey& key, ByteView plaintext, Drbg& rng);
Bytes open(const SymmetricKey& key, ByteView sealed);
bool try_open(const SymmetricKey& key, ByteView sealed, Bytes& plaintext);

// Overwrites memory in a way the optimizer may not elide.
void wipe(std::span<std::uint8_t> buffer);

}  // namespace prilok::crypto

#endif  // PRILOK_CRYPTO_HPP_
