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


#include <set>

#include "doctest.h"
#include "prilok/attack_suite.hpp"

using namespace prilok;

TEST_CASE("every attack fails safely") {
  ScenarioConfig cfg = load_config(PRILOK_SOURCE_DIR "/scenarios/small.json");
  for (std::uint64_t seed : {cfg.seed, std::uint64_t{7}}) {
    cfg.seed = seed;
    std::vector<AttackOutcome> outcomes = run_attack_suite(cfg);
    CHECK(outcomes.size() == 13);
    std::set<std::string> names;
    for (const AttackOutcome& o : outcomes) {
      names.insert(o.name);
      CHECK_MESSAGE(o.safe, o.name << ": " << o.detail);
      CHECK_MESSAGE(!o.extracted, o.name << ": " << o.detail);
      CHECK_FALSE(o.description.empty());
    }
    CHECK(names.size() == outcomes.size());
    CHECK_FALSE(names.count("driver_error"));

    nlohmann::json j = attack_matrix_json(outcomes);
    CHECK(j.dump().find("\"safe\":false") == std::string::npos);
    CHECK(attack_matrix_text(outcomes).find("13/13") != std::string::npos);
  }
}

TEST_CASE("the matrix reports unsafe outcomes") {
  std::vector<AttackOutcome> outcomes{{"a", "first", true, false, "ok"}, {"b", "second", false, true, "leak"}};
  CHECK(attack_matrix_text(outcomes).find("UNSAFE") != std::string::npos);
  CHECK(attack_matrix_text(outcomes).find("1/2") != std::string::npos);
}
