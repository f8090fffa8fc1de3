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

// Proximity detail records: one phone's position relative to one base
// station's antenna centroid in one clock minute. Records never carry
// absolute coordinates; only the provider registry can place a BsCode.

#ifndef PRILOK_PDR_HPP_
#define PRILOK_PDR_HPP_

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prilok/bytes.hpp"
#include "prilok/geometry.hpp"

namespace prilok {

// Whole minutes since the scenario epoch.
using Minute = std::int64_t;

inline constexpr Minute kMinutesPerDay = 1440;

enum class PrecisionClass : std::uint8_t { kMacro = 0, kPico = 1, kFemto = 2 };

std::string_view to_string(PrecisionClass c);
PrecisionClass parse_precision_class(std::string_view name);

struct PhoneId {
  std::string nr;    // national number, digits only
  std::string imei;  // exactly 15 digits

  friend auto operator<=>(const PhoneId&, const PhoneId&) = default;
  friend bool operator==(const PhoneId&, const PhoneId&) = default;

  std::string str() const { return nr + "/" + imei; }
};

// Throws kValidation if nr is empty or non-numeric, or imei is not 15 digits.
void validate(const PhoneId& phone);
PhoneId make_phone_id(std::string nr, std::string imei);

inline constexpr std::size_t kBsCodeLength = 16;

// Opaque base-station token. Identity is the code alone; the precision class
// rides along so consumers can weigh measurements without a registry lookup.
struct BsCode {
  std::string code;
  PrecisionClass precision = PrecisionClass::kMacro;

  friend bool operator==(const BsCode& a, const BsCode& b) { return a.code == b.code; }
  friend std::strong_ordering operator<=>(const BsCode& a, const BsCode& b) {
    return a.code <=> b.code;
  }
};

// 16 lowercase hex characters: HMAC-SHA-256(key, provider || station index)
// truncated to 8 bytes.
BsCode make_bs_code(ByteView provider_key, int provider, int station_index,
                    PrecisionClass precision);

struct ProxVector {
  double radius = 0.0;   // meters, >= 0
  double azimuth = 0.0;  // radians, [0, 2pi)

  friend bool operator==(const ProxVector&, const ProxVector&) = default;
};

double normalize_azimuth(double radians);
ProxVector polar_offset(Point2 centroid, Point2 position);
Point2 resolve(Point2 centroid, const ProxVector& prox);
// Law of cosines on two vectors measured from the same centroid.
double separation(const ProxVector& a, const ProxVector& b);

struct ProximityDetailRecord {
  BsCode bs;
  PhoneId phone;
  ProxVector prox;
  Minute t_pdr = 0;

  friend bool operator==(const ProximityDetailRecord&, const ProximityDetailRecord&) = default;
};

using Pdr = ProximityDetailRecord;

// All records share `minute` and `bs`; at most one per phone, sorted by phone.
struct PdrSet {
  Minute minute = 0;
  BsCode bs;
  std::vector<Pdr> records;
};

Pdr make_pdr(const BsCode& bs, const PhoneId& phone, ProxVector relative_position, Minute minute);

// One set per (bs, minute), sorted by (minute, bs.code). Throws
// kDuplicateRecord for a repeated (bs, phone, minute) triple.
std::vector<PdrSet> group_into_sets(std::span<const Pdr> records);
std::vector<Pdr> flatten(std::span<const PdrSet> sets);

// Canonical layout, bit-exact across implementations:
//   bs.code (16 bytes ASCII hex) || nr (u32 length + UTF-8) || imei (15 bytes)
//   || radius (f64 BE) || azimuth (f64 BE) || t_pdr (u64 BE)
Bytes serialize_pdr(const Pdr& pdr);

// The layout omits precision class, so decoding needs a lookup for it.
using PrecisionLookup = std::function<PrecisionClass(std::string_view code)>;
Pdr deserialize_pdr(ByteView bytes, const PrecisionLookup& precision_of);

// minute (u64) || bs.code (16) || count (u32) || count x length-prefixed PDR
Bytes serialize_pdr_set(const PdrSet& set);
PdrSet deserialize_pdr_set(ByteView bytes, const PrecisionLookup& precision_of);

}  // namespace prilok

#endif  // PRILOK_PDR_HPP_
