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

#include "prilok/pdr.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <tuple>

#include "prilok/crypto.hpp"
#include "prilok/error.hpp"

namespace prilok {

namespace {
bool all_digits(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

constexpr std::size_t kImeiLength = 15;
}  // namespace

std::string_view to_string(PrecisionClass c) {
  switch (c) {
    case PrecisionClass::kMacro: return "MACRO";
    case PrecisionClass::kPico: return "PICO";
    case PrecisionClass::kFemto: return "FEMTO";
  }
  return "MACRO";
}

PrecisionClass parse_precision_class(std::string_view name) {
  if (name == "MACRO") return PrecisionClass::kMacro;
  if (name == "PICO") return PrecisionClass::kPico;
  if (name == "FEMTO") return PrecisionClass::kFemto;
  fail(ErrorCode::kValidation, "unknown precision class '" + std::string(name) + "'");
}

void validate(const PhoneId& phone) {
  if (phone.nr.empty() || !all_digits(phone.nr)) {
    fail(ErrorCode::kValidation, "phone number must be a non-empty digit string");
  }
  if (phone.imei.size() != kImeiLength || !all_digits(phone.imei)) {
    fail(ErrorCode::kValidation, "imei must be exactly 15 digits");
  }
}

PhoneId make_phone_id(std::string nr, std::string imei) {
  PhoneId id{std::move(nr), std::move(imei)};
  validate(id);
  return id;
}

BsCode make_bs_code(ByteView provider_key, int provider, int station_index,
                    PrecisionClass precision) {
  Bytes msg = ByteWriter()
                  .raw(std::string_view("bs-code"))
                  .u32(static_cast<std::uint32_t>(provider))
                  .u32(static_cast<std::uint32_t>(station_index))
                  .bytes();
  crypto::Digest mac = crypto::hmac_sha256(provider_key, msg);
  return BsCode{to_hex(ByteView(mac.data(), kBsCodeLength / 2)), precision};
}

double normalize_azimuth(double radians) {
  constexpr double kTwoPi = 2 * std::numbers::pi;
  double a = std::fmod(radians, kTwoPi);
  if (a < 0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

ProxVector polar_offset(Point2 centroid, Point2 position) {
  double dx = position.x - centroid.x;
  double dy = position.y - centroid.y;
  double r = std::hypot(dx, dy);
  return {r, r == 0.0 ? 0.0 : normalize_azimuth(std::atan2(dy, dx))};
}

Point2 resolve(Point2 centroid, const ProxVector& prox) {
  return {centroid.x + prox.radius * std::cos(prox.azimuth),
          centroid.y + prox.radius * std::sin(prox.azimuth)};
}

double separation(const ProxVector& a, const ProxVector& b) {
  double sq = a.radius * a.radius + b.radius * b.radius -
              2 * a.radius * b.radius * std::cos(a.azimuth - b.azimuth);
  return std::sqrt(std::max(0.0, sq));
}

Pdr make_pdr(const BsCode& bs, const PhoneId& phone, ProxVector relative_position, Minute minute) {
  validate(phone);
  if (minute < 0) fail(ErrorCode::kValidation, "minute must be >= 0");
  if (bs.code.size() != kBsCodeLength) fail(ErrorCode::kValidation, "bs code must be 16 chars");
  if (!(relative_position.radius >= 0.0)) fail(ErrorCode::kValidation, "radius must be >= 0");
  relative_position.azimuth = normalize_azimuth(relative_position.azimuth);
  return Pdr{bs, phone, relative_position, minute};
}

std::vector<PdrSet> group_into_sets(std::span<const Pdr> records) {
  std::map<std::pair<Minute, std::string>, PdrSet> by_key;
  for (const Pdr& r : records) {
    auto [it, inserted] = by_key.try_emplace({r.t_pdr, r.bs.code});
    if (inserted) {
      it->second.minute = r.t_pdr;
      it->second.bs = r.bs;
    }
    it->second.records.push_back(r);
  }
  std::vector<PdrSet> out;
  out.reserve(by_key.size());
  for (auto& [key, set] : by_key) {
    std::sort(set.records.begin(), set.records.end(),
              [](const Pdr& a, const Pdr& b) { return a.phone < b.phone; });
    auto dup = std::adjacent_find(set.records.begin(), set.records.end(),
                                  [](const Pdr& a, const Pdr& b) { return a.phone == b.phone; });
    if (dup != set.records.end()) {
      fail(ErrorCode::kDuplicateRecord, "phone " + dup->phone.str() + " twice at bs " +
                                            set.bs.code + " minute " + std::to_string(set.minute));
    }
    out.push_back(std::move(set));
  }
  return out;
}

std::vector<Pdr> flatten(std::span<const PdrSet> sets) {
  std::vector<Pdr> out;
  for (const PdrSet& s : sets) out.insert(out.end(), s.records.begin(), s.records.end());
  return out;
}

Bytes serialize_pdr(const Pdr& pdr) {
  ByteWriter w;
  w.raw(pdr.bs.code)
      .prefixed(pdr.phone.nr)
      .raw(pdr.phone.imei)
      .f64(pdr.prox.radius)
      .f64(pdr.prox.azimuth)
      .u64(static_cast<std::uint64_t>(pdr.t_pdr));
  return std::move(w).bytes();
}

namespace {
Pdr read_pdr(ByteReader& r, const PrecisionLookup& precision_of) {
  Pdr p;
  p.bs.code = r.raw_string(kBsCodeLength);
  p.bs.precision = precision_of ? precision_of(p.bs.code) : PrecisionClass::kMacro;
  p.phone.nr = r.prefixed_string();
  p.phone.imei = r.raw_string(kImeiLength);
  p.prox.radius = r.f64();
  p.prox.azimuth = r.f64();
  p.t_pdr = static_cast<Minute>(r.u64());
  return p;
}
}  // namespace

Pdr deserialize_pdr(ByteView bytes, const PrecisionLookup& precision_of) {
  ByteReader r(bytes);
  Pdr p = read_pdr(r, precision_of);
  r.expect_done();
  return p;
}

Bytes serialize_pdr_set(const PdrSet& set) {
  ByteWriter w;
  w.u64(static_cast<std::uint64_t>(set.minute))
      .raw(set.bs.code)
      .u32(static_cast<std::uint32_t>(set.records.size()));
  for (const Pdr& p : set.records) w.prefixed(serialize_pdr(p));
  return std::move(w).bytes();
}

PdrSet deserialize_pdr_set(ByteView bytes, const PrecisionLookup& precision_of) {
  ByteReader r(bytes);
  PdrSet set;
  set.minute = static_cast<Minute>(r.u64());
  set.bs.code = r.raw_string(kBsCodeLength);
  set.bs.precision = precision_of ? precision_of(set.bs.code) : PrecisionClass::kMacro;
  std::uint32_t count = r.u32();
  set.records.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    ByteReader inner(r.prefixed());
    set.records.push_back(read_pdr(inner, precision_of));
    inner.expect_done();
  }
  r.expect_done();
  return set;
}

}  // namespace prilok
