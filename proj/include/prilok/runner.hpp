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

// End-to-end scenario orchestration on a simulated clock:
// generate -> observe -> push -> prune -> alert -> fetch -> vault -> analyse
// -> report -> back to Passive.

#ifndef PRILOK_RUNNER_HPP_
#define PRILOK_RUNNER_HPP_

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "prilok/cep.hpp"
#include "prilok/execution.hpp"
#include "prilok/ledger.hpp"
#include "prilok/scenario.hpp"
#include "prilok/world.hpp"

namespace prilok {

struct FaultSpec {
  std::vector<int> byzantine_clouds;
  std::vector<int> crashed_clouds;
  std::vector<int> silent_authorities;
  std::vector<int> equivocating_authorities;

  bool empty() const {
    return byzantine_clouds.empty() && crashed_clouds.empty() && silent_authorities.empty() &&
           equivocating_authorities.empty();
  }
};

// Comma-separated: byzantine-cloud=I, crash-cloud=I, silent-authority=I,
// equivocating-authority=I. Throws kConfiguration.
FaultSpec parse_faults(const std::string& spec);
std::string to_string(const FaultSpec& faults);

struct RunOptions {
  FaultSpec faults;
  bool export_traces = false;
  Execution exec = Execution::kParallel;
};

struct InvariantCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct RunReport {
  std::string scenario_digest;  // sha256 of the canonical config
  std::uint64_t seed = 0;
  std::string faults;

  std::size_t phones = 0;
  std::size_t stations = 0;
  std::size_t pdrs_emitted = 0;
  std::size_t sets_pushed = 0;
  std::size_t sets_dropped = 0;
  std::size_t sets_pruned = 0;
  std::size_t sets_fetched = 0;
  std::size_t vault_objects = 0;
  std::size_t suspicions = 0;
  std::size_t pc_susp = 0;
  std::size_t completion_pairs = 0;
  std::array<std::size_t, 4> scores_by_class{};
  std::size_t pccont_records = 0;
  std::size_t dag_nodes = 0;
  std::size_t dag_edges = 0;
  std::size_t hotspot_cells = 0;

  std::size_t infections = 0;
  std::size_t transmissions = 0;
  std::size_t transmissions_flagged = 0;
  int longest_chain = 0;
  std::size_t planted_links = 0;
  std::size_t planted_flagged = 0;
  double recall = 0.0;          // over every ground-truth transmission
  double planted_recall = 0.0;  // over the planted chain links
  double precision = 0.0;       // DAG edges that are ground-truth transmissions

  Minute pdr_ttl = 0;
  Minute max_age_after_prune = 0;
  std::size_t prune_ticks = 0;

  std::size_t ledger_entries = 0;
  bool ledger_verified = false;
  std::vector<InvariantCheck> invariants;

  bool ok() const;
  nlohmann::json to_json() const;
  std::string summary() const;
};

struct RunResult {
  RunReport report;
  World world;
  std::vector<ContactSuspicion> suspicions;  // initial and completion, pc_susp or not
  std::vector<ContactScore> scores;
  std::vector<ContaminationRecord> pccont;
  InfectionDag dag;
  std::vector<HotspotCell> hotspots;
  std::vector<LedgerEntry> ledger;
  std::string vault_inventory;  // before the final secure delete
  nlohmann::json timing;        // wall-clock, kept out of the report
};

// Any invariant breach is recorded in the report rather than thrown; errors
// in the configuration still throw.
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

// report.json, summary.txt, ledger.jsonl, suspicions.json, scores.json,
// pccont.json, dag.json, dag.dot, hotspots.csv, vault_inventory.json,
// timing.json and, on request, traces.csv.
void write_artifacts(const RunResult& result, const std::filesystem::path& out_dir,
                     bool export_traces = false);

}  // namespace prilok

#endif  // PRILOK_RUNNER_HPP_
