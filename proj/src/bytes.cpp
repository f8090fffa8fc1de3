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

#include "prilok/bytes.hpp"

#include <bit>
#include <cstring>

#include "prilok/error.hpp"

namespace prilok {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}
}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kDuplicateRecord: return "duplicate-record";
    case ErrorCode::kInsufficientReadings: return "insufficient-readings";
    case ErrorCode::kDegenerateGeometry: return "degenerate-geometry";
    case ErrorCode::kConfiguration: return "configuration";
    case ErrorCode::kParameter: return "parameter";
    case ErrorCode::kReconstruction: return "reconstruction";
    case ErrorCode::kDecryption: return "decryption";
    case ErrorCode::kEncryption: return "encryption";
    case ErrorCode::kAuthorization: return "authorization";
    case ErrorCode::kLockedCloud: return "locked-cloud";
    case ErrorCode::kLocked: return "locked";
    case ErrorCode::kUnknownAuthority: return "unknown-authority";
    case ErrorCode::kDuplicateVote: return "duplicate-vote";
    case ErrorCode::kMalformedSignature: return "malformed-signature";
    case ErrorCode::kWrongClass: return "wrong-class";
    case ErrorCode::kInvalidTransition: return "invalid-transition";
    case ErrorCode::kUnknownRequest: return "unknown-request";
    case ErrorCode::kUnavailable: return "unavailable";
    case ErrorCode::kIntegrity: return "integrity";
    case ErrorCode::kWriteFailure: return "write-failure";
    case ErrorCode::kUnknownObject: return "unknown-object";
    case ErrorCode::kNoEvidence: return "no-evidence";
    case ErrorCode::kResolution: return "resolution";
    case ErrorCode::kFraming: return "framing";
    case ErrorCode::kInvariant: return "invariant";
  }
  return "unknown";
}

std::string to_hex(ByteView bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) fail(ErrorCode::kFraming, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) fail(ErrorCode::kFraming, "invalid hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

ByteWriter& ByteWriter::u8(std::uint8_t v) {
  out_.push_back(v);
  return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
  return *this;
}

ByteWriter& ByteWriter::f64(double v) { return u64(std::bit_cast<std::uint64_t>(v)); }

ByteWriter& ByteWriter::raw(ByteView v) {
  out_.insert(out_.end(), v.begin(), v.end());
  return *this;
}

ByteWriter& ByteWriter::raw(std::string_view v) {
  out_.insert(out_.end(), v.begin(), v.end());
  return *this;
}

ByteWriter& ByteWriter::prefixed(ByteView v) {
  u32(static_cast<std::uint32_t>(v.size()));
  return raw(v);
}

ByteWriter& ByteWriter::prefixed(std::string_view v) {
  u32(static_cast<std::uint32_t>(v.size()));
  return raw(v);
}

ByteView ByteReader::take(std::size_t n) {
  if (n > remaining()) fail(ErrorCode::kFraming, "truncated input");
  ByteView out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t ByteReader::u8() { return take(1)[0]; }

std::uint32_t ByteReader::u32() {
  std::uint32_t v = 0;
  for (std::uint8_t b : take(4)) v = (v << 8) | b;
  return v;
}

std::uint64_t ByteReader::u64() {
  std::uint64_t v = 0;
  for (std::uint8_t b : take(8)) v = (v << 8) | b;
  return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

ByteView ByteReader::raw(std::size_t n) { return take(n); }

std::string ByteReader::raw_string(std::size_t n) {
  ByteView v = take(n);
  return std::string(v.begin(), v.end());
}

ByteView ByteReader::prefixed() { return take(u32()); }

std::string ByteReader::prefixed_string() {
  ByteView v = prefixed();
  return std::string(v.begin(), v.end());
}

void ByteReader::expect_done() const {
  if (!done()) fail(ErrorCode::kFraming, "trailing bytes");
}

}  // namespace prilok
