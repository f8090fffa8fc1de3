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


// prilok: run scenarios, the attack suite and ledger/DAG utilities.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "prilok/attack_suite.hpp"
#include "prilok/error.hpp"
#include "prilok/ledger.hpp"
#include "prilok/report.hpp"
#include "prilok/runner.hpp"
#include "prilok/scenario.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw prilok::Error(prilok::ErrorCode::kConfiguration, "cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PriLok contact-tracing pipeline"};
  app.require_subcommand(1);

  std::string config_path, out_dir, faults, ledger_path, dag_path;
  std::optional<std::uint64_t> seed;
  bool traces = false;
  bool serial = false;

  auto* run = app.add_subcommand("run", "Run a scenario end to end and write its artifacts");
  run->add_option("--config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--faults", faults,
                  "Comma list of byzantine-cloud=I, crash-cloud=I, silent-authority=I, "
                  "equivocating-authority=I");
  run->add_flag("--traces", traces, "Also export ground-truth traces.csv");
  run->add_flag("--serial", serial, "Use the serial kernels");

  auto* attack = app.add_subcommand("attack-suite", "Run the adversarial drivers");
  attack->add_option("--config", config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  attack->add_option("--out", out_dir, "Write attacks.json here");
  attack->add_option("--seed", seed, "Override the scenario seed");

  auto* verify = app.add_subcommand("verify-ledger", "Check a ledger.jsonl hash chain");
  verify->add_option("--ledger", ledger_path, "ledger.jsonl")->required()->check(CLI::ExistingFile);

  auto* dot = app.add_subcommand("export-dag", "Convert dag.json to Graphviz DOT");
  dot->add_option("--dag", dag_path, "dag.json")->required()->check(CLI::ExistingFile);
  dot->add_option("--out", out_dir, "Output .dot file (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      prilok::ScenarioConfig config = prilok::load_config(config_path);
      if (seed) config.seed = *seed;
      prilok::RunOptions options;
      options.faults = prilok::parse_faults(faults);
      options.export_traces = traces;
      options.exec = serial ? prilok::Execution::kSerial : prilok::Execution::kParallel;
      prilok::RunResult result = prilok::run_scenario(config, options);
      prilok::write_artifacts(result, out_dir, traces);
      std::cout << result.report.summary();
      return result.report.ok() ? 0 : 1;
    }
    if (*attack) {
      prilok::ScenarioConfig config = prilok::load_config(config_path);
      if (seed) config.seed = *seed;
      auto outcomes = prilok::run_attack_suite(config);
      std::cout << prilok::attack_matrix_text(outcomes);
      nlohmann::json matrix = prilok::attack_matrix_json(outcomes);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream(std::filesystem::path(out_dir) / "attacks.json") << matrix.dump(2) << "\n";
      }
      return matrix["all_safe"].get<bool>() ? 0 : 1;
    }
    if (*verify) {
      std::ifstream in(ledger_path, std::ios::binary);
      auto entries = prilok::read_jsonl(in);
      if (!entries) {
        std::cout << "ledger is not in canonical form\n";
        return 1;
      }
      bool ok = prilok::verify_ledger(*entries);
      std::cout << entries->size() << " entries, " << (ok ? "chain verified" : "CHAIN BROKEN") << "\n";
      return ok ? 0 : 1;
    }
    if (*dot) {
      prilok::InfectionDag dag = prilok::dag_from_json(nlohmann::json::parse(read_file(dag_path)));
      std::string text = prilok::dag_dot(dag);
      if (out_dir.empty()) {
        std::cout << text;
      } else {
        std::ofstream(out_dir, std::ios::binary) << text;
      }
      return 0;
    }
  } catch (const prilok::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
