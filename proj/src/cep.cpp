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

#include "prilok/cep.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "prilok/error.hpp"

namespace prilok {

namespace {

using PairKey = std::pair<PhoneId, PhoneId>;

PairKey unordered(const PhoneId& a, const PhoneId& b) {
  return a < b ? PairKey{a, b} : PairKey{b, a};
}

const Capability& require_capability(const CepContext& ctx, unsigned rights, std::string_view op) {
  if (!ctx.capability) fail(ErrorCode::kAuthorization, std::string(op) + ": no capability");
  ctx.capability->require(rights, op);
  return *ctx.capability;
}

const ProviderRegistry* usable_registry(const CepContext& ctx) {
  return ctx.registry && ctx.capability->allows(kRightResolve) ? ctx.registry : nullptr;
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

std::vector<ContactSuspicion> find_suspicions(const CepContext& ctx, const PdrIndex& index,
                                              const PhoneOfInterest& poi) {
  require_capability(ctx, kRightReadEncrypted, "find_suspicions");
  if (poi.t_inf_min < 0) fail(ErrorCode::kValidation, "t_inf_min must be >= 0");
  const int v = index.phone_index(poi.phone);
  if (v < 0) return {};
  Minute start = scan_start(poi, ctx.suspicion, ctx.t_incub);
  std::vector<int> candidates = candidate_phones(index, v, start);
  return scan_candidates(index, poi, start, candidates, ctx.suspicion, usable_registry(ctx), ctx.exec);
}

int score_class(double raw, const ScoringConfig& config) {
  int c = 1;
  for (double bound : config.class_bounds) {
    if (raw >= bound) ++c;
  }
  return c;
}

double raw_score(const ScoreTerms& t, const SuspicionParams& params, const ScoringConfig& config) {
  const auto& w = config.weights;
  double proximity = 1.0 - t.prox_avg / params.prox_max_m;
  double duration = std::min(1.0, static_cast<double>(t.dur_tot) /
                                      (4.0 * static_cast<double>(params.dur_min)));
  return clamp01(w[0] * clamp01(proximity) + w[1] * duration +
                 w[2] * t.precision_prox * t.precision_dur + w[3] * clamp01(t.density) +
                 w[4] * clamp01(t.severity));
}

ContactScore score_suspicion(const CepContext& ctx, const PdrIndex& index,
                             const ContactSuspicion& suspicion) {
  require_capability(ctx, kRightReadEncrypted, "score_suspicions");
  const ScoringConfig& cfg = ctx.scoring;
  std::vector<const ContactWindow*> windows;
  for (const ContactWindow& w : suspicion.windows) {
    if (w.qualifies) windows.push_back(&w);
  }
  if (!suspicion.pc_susp || windows.empty()) {
    fail(ErrorCode::kNoEvidence, "no qualifying window for " + suspicion.v.str() + " - " + suspicion.u.str());
  }

  ContactScore out;
  out.v = suspicion.v;
  out.u = suspicion.u;
  out.region.start = windows.front()->region.start;
  out.region.end = windows.front()->region.end;
  double prox_sum = 0.0;
  double precision_sum = 0.0;
  std::size_t n = 0;
  for (const ContactWindow* w : windows) {
    out.region.start = std::min(out.region.start, w->region.start);
    out.region.end = std::max(out.region.end, w->region.end);
    for (const BsCode& c : w->region.cells) out.region.cells.push_back(c);
    out.terms.dur_tot += w->duration;
    std::vector<Minute> window_minutes;
    for (const ProxSample& s : w->samples) window_minutes.push_back(s.minute);
    std::sort(window_minutes.begin(), window_minutes.end());
    out.episodes.push_back({w->region, lower_median(window_minutes)});
    for (const ProxSample& s : w->samples) {
      prox_sum += s.prox;
      precision_sum += cfg.precision_factor[static_cast<std::size_t>(s.precision)];
      out.contact_minutes.push_back(s.minute);
      ++n;
    }
  }
  std::sort(out.region.cells.begin(), out.region.cells.end());
  out.region.cells.erase(std::unique(out.region.cells.begin(), out.region.cells.end()),
                         out.region.cells.end());
  std::sort(out.contact_minutes.begin(), out.contact_minutes.end());

  out.terms.prox_avg = prox_sum / static_cast<double>(n);
  out.terms.precision_prox = precision_sum / static_cast<double>(n);
  out.terms.precision_dur = cfg.precision_dur;

  // Mean distinct phones per minute seen by any cell of the region.
  std::set<std::string> cells;
  for (const BsCode& c : out.region.cells) cells.insert(c.code);
  double phone_minutes = 0.0;
  const auto& minutes = index.minutes();
  for (std::size_t i = index.lower_bound(out.region.start);
       i < minutes.size() && minutes[i].minute <= out.region.end; ++i) {
    for (const auto& ps : minutes[i].phones) {
      for (std::uint32_t r = ps.begin; r < ps.end; ++r) {
        if (cells.count(index.records()[r].bs.code)) {
          phone_minutes += 1.0;
          break;
        }
      }
    }
  }
  double span = static_cast<double>(out.region.end - out.region.start + 1);
  out.terms.density = std::min(1.0, phone_minutes / span / cfg.density_saturation);

  double severity = -1.0;
  for (const std::string& c : cells) {
    auto it = cfg.severity_by_cell.find(c);
    severity = std::max(severity, it == cfg.severity_by_cell.end() ? cfg.default_severity : it->second);
  }
  out.terms.severity = severity;

  out.raw = raw_score(out.terms, ctx.suspicion, cfg);
  out.score_class = score_class(out.raw, cfg);
  return out;
}

std::vector<ContactScore> score_suspicions(const CepContext& ctx, const PdrIndex& index,
                                           std::span<const ContactSuspicion> suspicions) {
  std::vector<ContactScore> out;
  out.reserve(suspicions.size());
  for (const ContactSuspicion& s : suspicions) out.push_back(score_suspicion(ctx, index, s));
  return out;
}

Minute lower_median(std::span<const Minute> sorted) {
  if (sorted.empty()) fail(ErrorCode::kNoEvidence, "median of an empty interval");
  return sorted[(sorted.size() - 1) / 2];
}

Findings complete_findings(const CepContext& ctx, const PdrIndex& index, const Findings& existing,
                           int class_threshold) {
  require_capability(ctx, kRightReadEncrypted, "complete_findings");
  std::set<PairKey> known;
  std::set<PhoneId> processed;
  for (const ContactSuspicion& s : existing.suspicions) {
    known.insert(unordered(s.v, s.u));
    processed.insert(s.v);
  }
  for (const ContactScore& s : existing.scores) known.insert(unordered(s.v, s.u));

  // (u, median minute of the first qualifying window) of every pair at or
  // above the threshold.
  std::deque<PhoneOfInterest> work;
  for (const ContactScore& s : existing.scores) {
    if (s.score_class >= class_threshold) work.push_back({s.u, s.episodes.front().median_contact});
  }

  Findings added;
  while (!work.empty()) {
    PhoneOfInterest poi = std::move(work.front());
    work.pop_front();
    if (!processed.insert(poi.phone).second) continue;
    for (ContactSuspicion& s : find_suspicions(ctx, index, poi)) {
      if (!s.pc_susp) continue;
      if (!known.insert(unordered(s.v, s.u)).second) continue;
      ContactScore score = score_suspicion(ctx, index, s);
      if (score.score_class >= class_threshold) {
        work.push_back({score.u, score.episodes.front().median_contact});
      }
      added.scores.push_back(std::move(score));
      added.suspicions.push_back(std::move(s));
    }
  }
  return added;
}

BoundingBox region_coords(const SpaceTimeRegion& region, const ProviderRegistry& registry) {
  if (region.cells.empty()) fail(ErrorCode::kValidation, "region has no cells");
  BoundingBox box;
  bool first = true;
  for (const BsCode& c : region.cells) {
    const StationInfo& s = registry.station(c.code);
    BoundingBox b{{s.centroid.x - s.useful_range, s.centroid.y - s.useful_range},
                  {s.centroid.x + s.useful_range, s.centroid.y + s.useful_range}};
    if (first) {
      box = b;
      first = false;
    } else {
      box.min.x = std::min(box.min.x, b.min.x);
      box.min.y = std::min(box.min.y, b.min.y);
      box.max.x = std::max(box.max.x, b.max.x);
      box.max.y = std::max(box.max.y, b.max.y);
    }
  }
  return box;
}

std::vector<ContaminationRecord> build_pccont(const Capability& capability,
                                              std::span<const ContactScore> scores,
                                              const std::map<PhoneId, Minute>& infected,
                                              const ProviderRegistry& registry) {
  capability.require(kRightDecrypt | kRightResolve, "build_pccont");
  // Both phones of a pair may have been scanned; their views of one meeting
  // overlap, and the view that starts earlier saw more of it.
  struct Candidate {
    const ContactScore* score;
    const ContactEpisode* episode;
  };
  std::map<PairKey, std::vector<Candidate>> by_pair;
  std::vector<PairKey> order;
  for (const ContactScore& s : scores) {
    if (!infected.count(s.v) || !infected.count(s.u)) continue;
    PairKey key = unordered(s.v, s.u);
    auto [it, fresh] = by_pair.try_emplace(key);
    if (fresh) order.push_back(key);
    for (const ContactEpisode& e : s.episodes) it->second.push_back({&s, &e});
  }
  std::vector<ContaminationRecord> out;
  for (const PairKey& key : order) {
    std::vector<Candidate>& cands = by_pair[key];
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      return a.episode->region.start < b.episode->region.start;
    });
    Minute covered_until = -1;
    for (const Candidate& c : cands) {
      if (c.episode->region.start <= covered_until) continue;
      covered_until = c.episode->region.end;
      ContaminationRecord r;
      r.v = c.score->v;
      r.u = c.score->u;
      r.region = c.episode->region;
      r.coords = region_coords(r.region, registry);
      r.region.coords = r.coords;
      r.median_contact = c.episode->median_contact;
      r.t_inf_min_v = infected.at(r.v);
      r.t_inf_min_u = infected.at(r.u);
      out.push_back(std::move(r));
    }
  }
  return out;
}

InfectionDag build_dag(std::span<const ContaminationRecord> records, Minute t_incub_min,
                       Minute t_incub_max) {
  if (t_incub_min > t_incub_max || t_incub_min < 0) {
    fail(ErrorCode::kParameter, "incubation bounds must satisfy 0 <= min <= max");
  }
  InfectionDag dag;
  std::map<PairKey, DagEdge> edges;
  for (const ContaminationRecord& r : records) {
    dag.nodes.push_back(r.v);
    dag.nodes.push_back(r.u);
    struct Direction {
      const PhoneId& from;
      const PhoneId& to;
      Minute t_from;
      Minute t_to;
    };
    for (const Direction& d : {Direction{r.v, r.u, r.t_inf_min_v, r.t_inf_min_u},
                               Direction{r.u, r.v, r.t_inf_min_u, r.t_inf_min_v}}) {
      if (d.from == d.to) continue;
      bool already_infected = r.median_contact >= d.t_from;
      bool generation_gap = d.t_to >= d.t_from + t_incub_min;
      // Equal instants only pass with a zero minimum; PhoneId order breaks the tie.
      bool ordered = d.t_to > d.t_from || (d.t_to == d.t_from && d.from < d.to);
      Minute gap = std::llabs(r.median_contact - d.t_to);
      bool consistent = gap <= t_incub_max;
      if (!(already_infected && generation_gap && ordered && consistent)) continue;
      double weight = t_incub_max > 0 ? 1.0 - static_cast<double>(gap) / static_cast<double>(t_incub_max)
                                      : 1.0;
      PairKey key{d.from, d.to};
      auto it = edges.find(key);
      if (it == edges.end() || weight > it->second.weight) {
        edges[key] = DagEdge{d.from, d.to, r, weight};
      }
    }
  }
  std::sort(dag.nodes.begin(), dag.nodes.end());
  dag.nodes.erase(std::unique(dag.nodes.begin(), dag.nodes.end()), dag.nodes.end());
  for (auto& [key, e] : edges) dag.edges.push_back(std::move(e));
  return dag;
}

std::optional<std::vector<PhoneId>> topological_order(const InfectionDag& dag) {
  std::map<PhoneId, int> indegree;
  std::map<PhoneId, std::vector<PhoneId>> out_edges;
  for (const PhoneId& n : dag.nodes) indegree[n] = 0;
  for (const DagEdge& e : dag.edges) {
    indegree[e.from];
    ++indegree[e.to];
    out_edges[e.from].push_back(e.to);
  }
  std::set<PhoneId> ready;
  for (const auto& [n, d] : indegree) {
    if (d == 0) ready.insert(n);
  }
  std::vector<PhoneId> order;
  while (!ready.empty()) {
    PhoneId n = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(n);
    for (const PhoneId& m : out_edges[n]) {
      if (--indegree[m] == 0) ready.insert(m);
    }
  }
  if (order.size() != indegree.size()) return std::nullopt;
  return order;
}

std::vector<HotspotCell> hotspot_map(std::span<const ContaminationRecord> records, double cell_size) {
  if (!(cell_size > 0) || !std::isfinite(cell_size)) fail(ErrorCode::kParameter, "grid cell size must be > 0");
  std::map<std::pair<std::int64_t, std::int64_t>, int> counts;
  for (const ContaminationRecord& r : records) {
    Point2 c = r.coords.center();
    ++counts[{static_cast<std::int64_t>(std::floor(c.x / cell_size)),
              static_cast<std::int64_t>(std::floor(c.y / cell_size))}];
  }
  std::vector<HotspotCell> out;
  for (const auto& [cell, n] : counts) out.push_back({cell.first, cell.second, n});
  std::stable_sort(out.begin(), out.end(),
                   [](const HotspotCell& a, const HotspotCell& b) { return a.count > b.count; });
  return out;
}

}  // namespace prilok
