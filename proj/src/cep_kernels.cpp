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

// Index construction and the pair-partitioned suspicion scan.

#include <algorithm>
#include <cmath>
#include <exception>

#include "prilok/cep.hpp"
#include "prilok/error.hpp"

namespace prilok {

namespace {

bool index_order(const Pdr& a, const Pdr& b) {
  if (a.t_pdr != b.t_pdr) return a.t_pdr < b.t_pdr;
  if (a.phone != b.phone) return a.phone < b.phone;
  return a.bs.code < b.bs.code;
}

struct VMinute {
  const PdrIndex::MinuteSlice* slice;
  std::span<const Pdr> records;
};

ContactSuspicion scan_one(const PdrIndex& index, const PhoneOfInterest& poi,
                          const std::vector<VMinute>& v_minutes, int u,
                          const SuspicionParams& params, const ProviderRegistry* registry) {
  std::vector<ProxSample> samples;
  for (const VMinute& vm : v_minutes) {
    std::span<const Pdr> u_records = index.records(*vm.slice, u);
    if (u_records.empty()) continue;
    auto s = minute_proximity(vm.records, u_records, registry);
    if (s && s->prox <= params.prox_max_m) samples.push_back(std::move(*s));
  }
  ContactSuspicion out;
  out.v = poi.phone;
  out.u = index.phones()[static_cast<std::size_t>(u)];
  out.windows = build_windows(std::move(samples), params);
  out.pc_susp = std::any_of(out.windows.begin(), out.windows.end(),
                            [](const ContactWindow& w) { return w.qualifies; });
  return out;
}

}  // namespace

PdrIndex::PdrIndex(std::vector<Pdr> records) : records_(std::move(records)) {
  std::sort(records_.begin(), records_.end(), index_order);
  for (std::size_t i = 1; i < records_.size(); ++i) {
    const Pdr& a = records_[i - 1];
    const Pdr& b = records_[i];
    if (a.t_pdr == b.t_pdr && a.phone == b.phone && a.bs.code == b.bs.code) {
      fail(ErrorCode::kDuplicateRecord, "duplicate record for " + b.phone.str());
    }
  }
  for (const Pdr& p : records_) phones_.push_back(p.phone);
  std::sort(phones_.begin(), phones_.end());
  phones_.erase(std::unique(phones_.begin(), phones_.end()), phones_.end());

  std::size_t i = 0;
  while (i < records_.size()) {
    MinuteSlice ms;
    ms.minute = records_[i].t_pdr;
    ms.begin = static_cast<std::uint32_t>(i);
    while (i < records_.size() && records_[i].t_pdr == ms.minute) {
      PhoneSlice ps;
      ps.phone = phone_index(records_[i].phone);
      ps.begin = static_cast<std::uint32_t>(i);
      const PhoneId& id = records_[i].phone;
      while (i < records_.size() && records_[i].t_pdr == ms.minute && records_[i].phone == id) ++i;
      ps.end = static_cast<std::uint32_t>(i);
      ms.phones.push_back(ps);
    }
    ms.end = static_cast<std::uint32_t>(i);
    minutes_.push_back(std::move(ms));
  }
}

PdrIndex PdrIndex::from_sets(std::span<const PdrSet> sets) {
  return PdrIndex(flatten(sets));
}

int PdrIndex::phone_index(const PhoneId& phone) const {
  auto it = std::lower_bound(phones_.begin(), phones_.end(), phone);
  if (it == phones_.end() || *it != phone) return -1;
  return static_cast<int>(it - phones_.begin());
}

std::size_t PdrIndex::lower_bound(Minute m) const {
  auto it = std::lower_bound(minutes_.begin(), minutes_.end(), m,
                             [](const MinuteSlice& s, Minute x) { return s.minute < x; });
  return static_cast<std::size_t>(it - minutes_.begin());
}

const PdrIndex::MinuteSlice* PdrIndex::slice(Minute m) const {
  std::size_t i = lower_bound(m);
  return i < minutes_.size() && minutes_[i].minute == m ? &minutes_[i] : nullptr;
}

std::span<const Pdr> PdrIndex::records(const MinuteSlice& slice, int phone) const {
  auto it = std::lower_bound(slice.phones.begin(), slice.phones.end(), phone,
                             [](const PhoneSlice& s, int p) { return s.phone < p; });
  if (it == slice.phones.end() || it->phone != phone) return {};
  return std::span<const Pdr>(records_).subspan(it->begin, it->end - it->begin);
}

std::span<const Pdr> PdrIndex::records(Minute minute, const PhoneId& phone) const {
  const MinuteSlice* s = slice(minute);
  int p = phone_index(phone);
  if (!s || p < 0) return {};
  return records(*s, p);
}

bool better_pdr(const Pdr& a, const Pdr& b) {
  if (a.bs.precision != b.bs.precision) return a.bs.precision > b.bs.precision;
  return a.bs.code < b.bs.code;
}

std::optional<ProxSample> minute_proximity(std::span<const Pdr> v_records,
                                           std::span<const Pdr> u_records,
                                           const ProviderRegistry* registry) {
  if (v_records.empty() || u_records.empty()) return std::nullopt;
  const Pdr* best_v = nullptr;
  const Pdr* best_u = nullptr;
  // Both spans are sorted by code.
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < v_records.size() && j < u_records.size()) {
    int c = v_records[i].bs.code.compare(u_records[j].bs.code);
    if (c < 0) {
      ++i;
    } else if (c > 0) {
      ++j;
    } else {
      if (!best_v || better_pdr(v_records[i], *best_v)) {
        best_v = &v_records[i];
        best_u = &u_records[j];
      }
      ++i;
      ++j;
    }
  }
  if (best_v) {
    return ProxSample{best_v->t_pdr, separation(best_v->prox, best_u->prox), best_v->bs.precision,
                      best_v->bs.code};
  }
  if (!registry) return std::nullopt;
  const Pdr& bv = *std::min_element(v_records.begin(), v_records.end(), better_pdr);
  const Pdr& bu = *std::min_element(u_records.begin(), u_records.end(), better_pdr);
  Point2 pv = resolve(registry->station(bv.bs.code).centroid, bv.prox);
  Point2 pu = resolve(registry->station(bu.bs.code).centroid, bu.prox);
  return ProxSample{bv.t_pdr, distance(pv, pu), std::min(bv.bs.precision, bu.bs.precision),
                    bv.bs.code};
}

std::vector<ContactWindow> build_windows(std::vector<ProxSample> samples, const SuspicionParams& params) {
  std::vector<ContactWindow> out;
  ContactWindow cur;
  auto close = [&]() {
    if (cur.samples.empty()) return;
    cur.duration = static_cast<Minute>(cur.samples.size());
    cur.qualifies = cur.duration >= params.dur_min;
    cur.region.start = cur.samples.front().minute;
    cur.region.end = cur.samples.back().minute;
    for (const ProxSample& s : cur.samples) {
      BsCode c{s.cell, s.precision};
      if (std::find(cur.region.cells.begin(), cur.region.cells.end(), c) == cur.region.cells.end()) {
        cur.region.cells.push_back(c);
      }
    }
    std::sort(cur.region.cells.begin(), cur.region.cells.end());
    out.push_back(std::move(cur));
    cur = ContactWindow{};
  };
  for (ProxSample& s : samples) {
    if (!cur.samples.empty() && s.minute - cur.samples.back().minute - 1 > params.gap_tolerance) close();
    cur.samples.push_back(std::move(s));
  }
  close();
  return out;
}

Minute scan_start(const PhoneOfInterest& poi, const SuspicionParams& params, Minute t_incub) {
  return poi.t_inf_min -
         static_cast<Minute>(std::floor(params.lookback_fraction * static_cast<double>(t_incub)));
}

std::vector<int> candidate_phones(const PdrIndex& index, int v, Minute start) {
  std::vector<char> seen(index.phones().size(), 0);
  const auto& minutes = index.minutes();
  for (std::size_t i = index.lower_bound(start); i < minutes.size(); ++i) {
    if (index.records(minutes[i], v).empty()) continue;
    for (const auto& ps : minutes[i].phones) seen[static_cast<std::size_t>(ps.phone)] = 1;
  }
  std::vector<int> out;
  for (std::size_t p = 0; p < seen.size(); ++p) {
    if (seen[p] && static_cast<int>(p) != v) out.push_back(static_cast<int>(p));
  }
  return out;
}

std::vector<ContactSuspicion> scan_candidates(const PdrIndex& index, const PhoneOfInterest& poi,
                                              Minute start, std::span<const int> candidates,
                                              const SuspicionParams& params,
                                              const ProviderRegistry* registry, Execution exec) {
  const int v = index.phone_index(poi.phone);
  if (v < 0) return {};
  std::vector<VMinute> v_minutes;
  const auto& minutes = index.minutes();
  for (std::size_t i = index.lower_bound(start); i < minutes.size(); ++i) {
    std::span<const Pdr> r = index.records(minutes[i], v);
    if (!r.empty()) v_minutes.push_back({&minutes[i], r});
  }

  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(candidates.size());
  std::vector<ContactSuspicion> results(candidates.size());
  if (exec == Execution::kSerial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      results[static_cast<std::size_t>(i)] =
          scan_one(index, poi, v_minutes, candidates[static_cast<std::size_t>(i)], params, registry);
    }
  } else {
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        results[static_cast<std::size_t>(i)] =
            scan_one(index, poi, v_minutes, candidates[static_cast<std::size_t>(i)], params, registry);
      } catch (...) {
#pragma omp critical(prilok_scan_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  }

  std::vector<ContactSuspicion> out;
  for (ContactSuspicion& s : results) {
    if (!s.windows.empty()) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace prilok
