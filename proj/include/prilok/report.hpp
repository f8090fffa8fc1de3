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

// JSON, CSV and DOT renderings of analysis outputs.

#ifndef PRILOK_REPORT_HPP_
#define PRILOK_REPORT_HPP_

#include <span>
#include <string>

#include "json.hpp"
#include "prilok/cep_types.hpp"

namespace prilok {

nlohmann::json to_json(const PhoneId& phone);
nlohmann::json to_json(const SpaceTimeRegion& region);
nlohmann::json to_json(const ContactSuspicion& suspicion);
nlohmann::json to_json(const ContactScore& score);
nlohmann::json to_json(const ContaminationRecord& record);
nlohmann::json to_json(const InfectionDag& dag);

nlohmann::json suspicions_json(std::span<const ContactSuspicion> suspicions);
nlohmann::json scores_json(std::span<const ContactScore> scores);
nlohmann::json pccont_json(std::span<const ContaminationRecord> records);

// Throws kValidation on a malformed document.
InfectionDag dag_from_json(const nlohmann::json& j);

// cell_x,cell_y,count
std::string hotspots_csv(std::span<const HotspotCell> cells);
// Nodes labelled by phone number, edges by weight.
std::string dag_dot(const InfectionDag& dag);

}  // namespace prilok

#endif  // PRILOK_REPORT_HPP_
