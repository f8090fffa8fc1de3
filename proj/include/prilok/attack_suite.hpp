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

// Adversarial drivers against a freshly built deployment. Each attack either
// fails safely (the expected rejection, nothing extracted) or is reported as
// unsafe.

#ifndef PRILOK_ATTACK_SUITE_HPP_
#define PRILOK_ATTACK_SUITE_HPP_

#include <string>
#include <vector>

#include "json.hpp"
#include "prilok/scenario.hpp"

namespace prilok {

struct AttackOutcome {
  std::string name;
  std::string description;
  bool safe = false;
  bool extracted = false;  // the attacker obtained protected data
  std::string detail;
};

std::vector<AttackOutcome> run_attack_suite(const ScenarioConfig& config);

nlohmann::json attack_matrix_json(const std::vector<AttackOutcome>& outcomes);
std::string attack_matrix_text(const std::vector<AttackOutcome>& outcomes);

}  // namespace prilok

#endif  // PRILOK_ATTACK_SUITE_HPP_
