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

// Brute-force pairwise suspicion scanner. Walks every (u, minute) pair over
// a plain (minute, phone) table with no index, no partitioning and no threads.

#ifndef PRILOK_TESTS_ORACLE_BRUTE_FORCE_HPP_
#define PRILOK_TESTS_ORACLE_BRUTE_FORCE_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "prilok/cep_types.hpp"
#include "prilok/pdr.hpp"
#include "prilok/world.hpp"

namespace oracle {

using prilok::Minute;
using prilok::Pdr;
using prilok::PhoneId;

// Higher precision class wins, then the lexicographically smaller code.
inline int rank(const Pdr& p) { return static_cast<int>(p.bs.precision); }
inline const Pdr* pick(const std::vector<const Pdr*>& rs) {
  const Pdr* best = nullptr;
  for (const Pdr* r : rs) {
    if (!best || rank(*r) > rank(*best) || (rank(*r) == rank(*best) && r->bs.code < best->bs.code)) best = r;
  }
  return best;
}

struct Sample {
  Minute minute;
  double prox;
  prilok::PrecisionClass precision;
  std::string cell;
};

inline std::optional<Sample> proximity(const std::vector<const Pdr*>& vr, const std::vector<const Pdr*>& ur,
                                       const prilok::ProviderRegistry* registry) {
  // Best station both phones were seen by.
  const Pdr* v = nullptr;
  const Pdr* u = nullptr;
  for (const Pdr* a : vr) {
    for (const Pdr* b : ur) {
      if (a->bs.code != b->bs.code) continue;
      if (!v || rank(*a) > rank(*v) || (rank(*a) == rank(*v) && a->bs.code < v->bs.code)) {
        v = a;
        u = b;
      }
    }
  }
  if (v) {
    // Law of cosines, written out.
    double a = v->prox.radius, b = u->prox.radius, g = v->prox.azimuth - u->prox.azimuth;
    double d2 = a * a + b * b - 2 * a * b * std::cos(g);
    return Sample{v->t_pdr, std::sqrt(std::max(0.0, d2)), v->bs.precision, v->bs.code};
  }
  if (!registry) return std::nullopt;
  v = pick(vr);
  u = pick(ur);
  auto at = [&](const Pdr* p) {
    prilok::Point2 c = registry->station(p->bs.code).centroid;
    return prilok::Point2{c.x + p->prox.radius * std::cos(p->prox.azimuth),
                          c.y + p->prox.radius * std::sin(p->prox.azimuth)};
  };
  return Sample{v->t_pdr, prilok::distance(at(v), at(u)), std::min(v->bs.precision, u->bs.precision),
                v->bs.code};
}

struct Window {
  Minute start;
  Minute end;
  Minute duration;
  bool qualifies;
  std::set<std::string> cells;
  auto operator<=>(const Window&) const = default;
};

struct Suspicion {
  PhoneId u;
  bool pc_susp;
  std::vector<Window> windows;
};

// Records grouped by (minute, phone) and nothing else.
class Records {
 public:
  explicit Records(const std::vector<Pdr>& records) {
    std::set<PhoneId> ids;
    for (const Pdr& r : records) ids.insert(r.phone);
    phones_.assign(ids.begin(), ids.end());
    minutes_.resize(phones_.size());
    Minute last = 0;
    for (const Pdr& r : records) last = std::max(last, r.t_pdr);
    at_.resize(static_cast<std::size_t>(last + 1) * phones_.size());
    for (const Pdr& r : records) {
      int p = id(r.phone);
      at_[key(r.t_pdr, p)].push_back(&r);
      minutes_[static_cast<std::size_t>(p)].insert(r.t_pdr);
    }
  }

  const std::vector<PhoneId>& phones() const { return phones_; }
  int id(const PhoneId& p) const {
    auto it = std::lower_bound(phones_.begin(), phones_.end(), p);
    return it != phones_.end() && *it == p ? static_cast<int>(it - phones_.begin()) : -1;
  }
  const std::set<Minute>& minutes(int phone) const { return minutes_[static_cast<std::size_t>(phone)]; }
  const std::vector<const Pdr*>* at(Minute m, int phone) const {
    std::size_t k = key(m, phone);
    return k < at_.size() && !at_[k].empty() ? &at_[k] : nullptr;
  }

 private:
  std::size_t key(Minute m, int phone) const {
    return static_cast<std::size_t>(m) * phones_.size() + static_cast<std::size_t>(phone);
  }
  std::vector<PhoneId> phones_;
  std::vector<std::set<Minute>> minutes_;
  std::vector<std::vector<const Pdr*>> at_;  // minute-major table
};

inline std::vector<Suspicion> find(const Records& records, const PhoneId& v, Minute start,
                                   const prilok::SuspicionParams& params,
                                   const prilok::ProviderRegistry* registry) {
  const int vi = records.id(v);
  if (vi < 0) return {};
  // Every minute from `start` on in which v has a record.
  std::vector<std::pair<Minute, const std::vector<const Pdr*>*>> v_minutes;
  for (Minute m : records.minutes(vi)) {
    if (m >= start) v_minutes.emplace_back(m, records.at(m, vi));
  }
  std::vector<Suspicion> out;
  for (int ui = 0; ui < static_cast<int>(records.phones().size()); ++ui) {
    if (ui == vi) continue;
    std::vector<Sample> hits;
    for (const auto& [m, vr] : v_minutes) {
      const auto* ur = records.at(m, ui);
      if (!ur) continue;
      auto s = proximity(*vr, *ur, registry);
      if (s && s->prox <= params.prox_max_m) hits.push_back(*s);
    }
    if (hits.empty()) continue;
    Suspicion s{records.phones()[static_cast<std::size_t>(ui)], false, {}};
    std::size_t i = 0;
    while (i < hits.size()) {
      Window w{hits[i].minute, hits[i].minute, 0, false, {}};
      std::size_t j = i;
      while (j < hits.size() && (j == i || hits[j].minute - hits[j - 1].minute <= params.gap_tolerance + 1)) {
        w.end = hits[j].minute;
        w.cells.insert(hits[j].cell);
        ++w.duration;
        ++j;
      }
      w.qualifies = w.duration >= params.dur_min;
      s.pc_susp = s.pc_susp || w.qualifies;
      s.windows.push_back(w);
      i = j;
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<Suspicion> find(const std::vector<Pdr>& records, const PhoneId& v, Minute start,
                                   const prilok::SuspicionParams& params,
                                   const prilok::ProviderRegistry* registry) {
  return find(Records(records), v, start, params, registry);
}

}  // namespace oracle

#endif  // PRILOK_TESTS_ORACLE_BRUTE_FORCE_HPP_
