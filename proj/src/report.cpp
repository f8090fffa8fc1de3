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

#include "prilok/report.hpp"

#include <cstdio>
#include <sstream>

#include "prilok/error.hpp"

namespace prilok {

namespace {

using nlohmann::json;

json box_json(const BoundingBox& b) {
  return {{"min_x", b.min.x}, {"min_y", b.min.y}, {"max_x", b.max.x}, {"max_y", b.max.y}};
}

BoundingBox box_from(const json& j) {
  return {{j.at("min_x").get<double>(), j.at("min_y").get<double>()},
          {j.at("max_x").get<double>(), j.at("max_y").get<double>()}};
}

PhoneId phone_from(const json& j) {
  return make_phone_id(j.at("nr").get<std::string>(), j.at("imei").get<std::string>());
}

SpaceTimeRegion region_from(const json& j) {
  SpaceTimeRegion r;
  r.start = j.at("start").get<Minute>();
  r.end = j.at("end").get<Minute>();
  for (const json& c : j.at("cells")) {
    r.cells.push_back({c.at("code").get<std::string>(),
                       parse_precision_class(c.at("precision").get<std::string>())});
  }
  if (j.contains("coords")) r.coords = box_from(j.at("coords"));
  return r;
}

}  // namespace

json to_json(const PhoneId& phone) { return {{"nr", phone.nr}, {"imei", phone.imei}}; }

json to_json(const SpaceTimeRegion& region) {
  json cells = json::array();
  for (const BsCode& c : region.cells) {
    cells.push_back({{"code", c.code}, {"precision", to_string(c.precision)}});
  }
  json j{{"start", region.start}, {"end", region.end}, {"cells", cells}};
  if (region.coords) j["coords"] = box_json(*region.coords);
  return j;
}

json to_json(const ContactSuspicion& s) {
  json windows = json::array();
  for (const ContactWindow& w : s.windows) {
    json samples = json::array();
    for (const ProxSample& p : w.samples) {
      samples.push_back({{"minute", p.minute},
                         {"prox", p.prox},
                         {"precision", to_string(p.precision)},
                         {"cell", p.cell}});
    }
    windows.push_back({{"region", to_json(w.region)},
                       {"duration", w.duration},
                       {"qualifies", w.qualifies},
                       {"samples", samples}});
  }
  return {{"v", to_json(s.v)}, {"u", to_json(s.u)}, {"pc_susp", s.pc_susp}, {"windows", windows}};
}

json to_json(const ContactScore& s) {
  json episodes = json::array();
  for (const ContactEpisode& e : s.episodes) {
    episodes.push_back({{"region", to_json(e.region)}, {"median_contact", e.median_contact}});
  }
  return {{"v", to_json(s.v)},
          {"u", to_json(s.u)},
          {"region", to_json(s.region)},
          {"raw", s.raw},
          {"class", s.score_class},
          {"terms",
           {{"prox_avg", s.terms.prox_avg},
            {"dur_tot", s.terms.dur_tot},
            {"precision_prox", s.terms.precision_prox},
            {"precision_dur", s.terms.precision_dur},
            {"density", s.terms.density},
            {"severity", s.terms.severity}}},
          {"contact_minutes", s.contact_minutes},
          {"episodes", episodes}};
}

json to_json(const ContaminationRecord& r) {
  return {{"v", to_json(r.v)},
          {"u", to_json(r.u)},
          {"region", to_json(r.region)},
          {"coords", box_json(r.coords)},
          {"median_contact", r.median_contact},
          {"t_inf_min_v", r.t_inf_min_v},
          {"t_inf_min_u", r.t_inf_min_u}};
}

json to_json(const InfectionDag& dag) {
  json nodes = json::array();
  for (const PhoneId& n : dag.nodes) nodes.push_back(to_json(n));
  json edges = json::array();
  for (const DagEdge& e : dag.edges) {
    edges.push_back({{"from", to_json(e.from)},
                     {"to", to_json(e.to)},
                     {"weight", e.weight},
                     {"record", to_json(e.record)}});
  }
  return {{"nodes", nodes}, {"edges", edges}};
}

json suspicions_json(std::span<const ContactSuspicion> suspicions) {
  json out = json::array();
  for (const auto& s : suspicions) out.push_back(to_json(s));
  return out;
}

json scores_json(std::span<const ContactScore> scores) {
  json out = json::array();
  for (const auto& s : scores) out.push_back(to_json(s));
  return out;
}

json pccont_json(std::span<const ContaminationRecord> records) {
  json out = json::array();
  for (const auto& r : records) out.push_back(to_json(r));
  return out;
}

InfectionDag dag_from_json(const json& j) {
  try {
    InfectionDag dag;
    for (const json& n : j.at("nodes")) dag.nodes.push_back(phone_from(n));
    for (const json& e : j.at("edges")) {
      DagEdge edge;
      edge.from = phone_from(e.at("from"));
      edge.to = phone_from(e.at("to"));
      edge.weight = e.at("weight").get<double>();
      const json& r = e.at("record");
      edge.record.v = phone_from(r.at("v"));
      edge.record.u = phone_from(r.at("u"));
      edge.record.region = region_from(r.at("region"));
      edge.record.coords = box_from(r.at("coords"));
      edge.record.median_contact = r.at("median_contact").get<Minute>();
      edge.record.t_inf_min_v = r.at("t_inf_min_v").get<Minute>();
      edge.record.t_inf_min_u = r.at("t_inf_min_u").get<Minute>();
      dag.edges.push_back(std::move(edge));
    }
    return dag;
  } catch (const json::exception& e) {
    fail(ErrorCode::kValidation, std::string("malformed DAG document: ") + e.what());
  }
}

std::string hotspots_csv(std::span<const HotspotCell> cells) {
  std::ostringstream out;
  out << "cell_x,cell_y,count\n";
  for (const HotspotCell& c : cells) out << c.cell_x << ',' << c.cell_y << ',' << c.count << '\n';
  return out.str();
}

std::string dag_dot(const InfectionDag& dag) {
  std::ostringstream out;
  out << "digraph infection {\n  rankdir=LR;\n";
  for (const PhoneId& n : dag.nodes) out << "  \"" << n.nr << "\";\n";
  char weight[32];
  for (const DagEdge& e : dag.edges) {
    std::snprintf(weight, sizeof(weight), "%.3f", e.weight);
    out << "  \"" << e.from.nr << "\" -> \"" << e.to.nr << "\" [label=\"" << weight
        << "\", tooltip=\"median contact " << e.record.median_contact << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace prilok
