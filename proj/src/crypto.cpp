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

#include "prilok/crypto.hpp"

#include <sodium.h>

#include <cstring>

#include "prilok/error.hpp"

namespace prilok::crypto {

namespace {

void ensure_sodium() {
  static const bool ready = [] { return sodium_init() >= 0; }();
  if (!ready) fail(ErrorCode::kEncryption, "libsodium initialisation failed");
}

constexpr std::size_t kNonceBytes = crypto_aead_xchacha20poly1305_ietf_NPUBBYTES;
constexpr std::size_t kTagBytes = crypto_aead_xchacha20poly1305_ietf_ABYTES;

Bytes aead_encrypt(const std::uint8_t* key, ByteView plaintext, ByteView ad,
                   const std::uint8_t* nonce) {
  Bytes ct(plaintext.size() + kTagBytes);
  unsigned long long len = 0;
  crypto_aead_xchacha20poly1305_ietf_encrypt(ct.data(), &len, plaintext.data(), plaintext.size(),
                                             ad.data(), ad.size(), nullptr, nonce, key);
  ct.resize(len);
  return ct;
}

bool aead_decrypt(const std::uint8_t* key, ByteView ciphertext, ByteView ad,
                  const std::uint8_t* nonce, Bytes& out) {
  if (ciphertext.size() < kTagBytes) return false;
  out.resize(ciphertext.size() - kTagBytes);
  unsigned long long len = 0;
  int rc = crypto_aead_xchacha20poly1305_ietf_decrypt(out.data(), &len, nullptr,
                                                      ciphertext.data(), ciphertext.size(),
                                                      ad.data(), ad.size(), nonce, key);
  if (rc != 0) {
    out.clear();
    return false;
  }
  out.resize(len);
  return true;
}

}  // namespace

Digest sha256(ByteView data) {
  ensure_sodium();
  Digest out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

Digest hmac_sha256(ByteView key, ByteView message) {
  ensure_sodium();
  crypto_auth_hmacsha256_state state;
  crypto_auth_hmacsha256_init(&state, key.data(), key.size());
  crypto_auth_hmacsha256_update(&state, message.data(), message.size());
  Digest out{};
  crypto_auth_hmacsha256_final(&state, out.data());
  return out;
}

Drbg::Drbg(std::uint64_t seed) {
  Bytes s = ByteWriter().raw(std::string_view("prilok-drbg")).u64(seed).bytes();
  seed_ = sha256(s);
}

void Drbg::fill(std::span<std::uint8_t> out) {
  ensure_sodium();
  Bytes material = ByteWriter().raw(view(seed_)).u64(counter_++).bytes();
  Digest sub = sha256(material);
  randombytes_buf_deterministic(out.data(), out.size(), sub.data());
}

Bytes Drbg::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

SymmetricKey Drbg::key() {
  SymmetricKey k{};
  fill(k);
  return k;
}

std::uint64_t Drbg::next_u64() {
  std::array<std::uint8_t, 8> b{};
  fill(b);
  std::uint64_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

Drbg Drbg::fork() {
  Digest child{};
  fill(child);
  return Drbg(child);
}

SigningKeyPair signing_keypair(Drbg& rng) {
  ensure_sodium();
  std::array<std::uint8_t, crypto_sign_SEEDBYTES> seed{};
  rng.fill(seed);
  SigningKeyPair kp;
  crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed.data());
  wipe(seed);
  return kp;
}

Signature sign(const SigningKeyPair& keys, ByteView message) {
  ensure_sodium();
  Signature sig{};
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(),
                       keys.secret_key.data());
  return sig;
}

bool verify(const SigningPublicKey& public_key, ByteView message, const Signature& signature) {
  ensure_sodium();
  return crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                     public_key.data()) == 0;
}

BoxKeyPair box_keypair(Drbg& rng) {
  ensure_sodium();
  std::array<std::uint8_t, crypto_box_SEEDBYTES> seed{};
  rng.fill(seed);
  BoxKeyPair kp;
  crypto_box_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed.data());
  wipe(seed);
  return kp;
}

BoxPublicKey box_public_from_secret(const BoxSecretKey& secret) {
  ensure_sodium();
  BoxPublicKey pk{};
  crypto_scalarmult_base(pk.data(), secret.data());
  return pk;
}

Bytes hybrid_encrypt(const BoxPublicKey& recipient, ByteView plaintext, Drbg& rng) {
  ensure_sodium();
  BoxKeyPair eph = box_keypair(rng);
  std::array<std::uint8_t, crypto_box_BEFORENMBYTES> shared{};
  if (crypto_box_beforenm(shared.data(), recipient.data(), eph.secret_key.data()) != 0) {
    wipe(eph.secret_key);
    fail(ErrorCode::kEncryption, "invalid recipient public key");
  }
  wipe(eph.secret_key);
  std::array<std::uint8_t, kNonceBytes> nonce{};
  rng.fill(nonce);
  Bytes ct = aead_encrypt(shared.data(), plaintext, eph.public_key, nonce.data());
  wipe(shared);
  ByteWriter w;
  w.raw(eph.public_key).raw(nonce).raw(ct);
  return std::move(w).bytes();
}

Bytes hybrid_decrypt(const BoxSecretKey& secret, ByteView ciphertext) {
  ensure_sodium();
  if (ciphertext.size() < 32 + kNonceBytes + kTagBytes) {
    fail(ErrorCode::kDecryption, "ciphertext too short");
  }
  ByteView eph = ciphertext.subspan(0, 32);
  ByteView nonce = ciphertext.subspan(32, kNonceBytes);
  ByteView body = ciphertext.subspan(32 + kNonceBytes);
  std::array<std::uint8_t, crypto_box_BEFORENMBYTES> shared{};
  if (crypto_box_beforenm(shared.data(), eph.data(), secret.data()) != 0) {
    fail(ErrorCode::kDecryption, "invalid ephemeral key");
  }
  Bytes out;
  bool ok = aead_decrypt(shared.data(), body, eph, nonce.data(), out);
  wipe(shared);
  if (!ok) fail(ErrorCode::kDecryption, "authentication failed");
  return out;
}

Bytes seal(const SymmetricKey& key, ByteView plaintext, Drbg& rng) {
  ensure_sodium();
  std::array<std::uint8_t, kNonceBytes> nonce{};
  rng.fill(nonce);
  Bytes ct = aead_encrypt(key.data(), plaintext, {}, nonce.data());
  ByteWriter w;
  w.raw(nonce).raw(ct);
  return std::move(w).bytes();
}

bool try_open(const SymmetricKey& key, ByteView sealed, Bytes& plaintext) {
  ensure_sodium();
  if (sealed.size() < kNonceBytes + kTagBytes) return false;
  return aead_decrypt(key.data(), sealed.subspan(kNonceBytes), {}, sealed.data(), plaintext);
}

Bytes open(const SymmetricKey& key, ByteView sealed) {
  Bytes out;
  if (!try_open(key, sealed, out)) fail(ErrorCode::kDecryption, "authentication failed");
  return out;
}

void wipe(std::span<std::uint8_t> buffer) {
  ensure_sodium();
  sodium_memzero(buffer.data(), buffer.size());
}

}  // namespace prilok::crypto
