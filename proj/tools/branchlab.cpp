// Copyright 2026 The branchlab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "branchlab/branchlab.hpp"

namespace {

struct CliFlags {
  std::string scenario_path;
  std::string q;
  std::string q_b;
  std::string n_outcomes;
  std::string n_runs;
  std::string epsilon;
  std::string delta;
  std::string seed;
  std::string k_cap;
  std::string class_cap;
  std::string out_dir = ".";
  std::string threads;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw branchlab::ParseError("cannot read scenario file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Scenario file first, command-line flags on top.
branchlab::ScenarioFields assemble_fields(branchlab::Command command,
                                          const CliFlags& flags) {
  branchlab::ScenarioFields fields;
  if (!flags.scenario_path.empty()) {
    fields = branchlab::parse_scenario_fields(read_file(flags.scenario_path));
    if (!fields.command) {
      throw branchlab::SchemaError("scenario file must name its command");
    }
    if (*fields.command != command) {
      throw branchlab::SchemaError(
          "scenario file is for '" + branchlab::to_string(*fields.command) +
          "', invoked as '" + branchlab::to_string(command) + "'");
    }
  }
  fields.command = command;
  if (!flags.q.empty()) fields.q = branchlab::parse_rational_values(flags.q);
  if (!flags.q_b.empty()) fields.q_b = branchlab::parse_rational_values(flags.q_b);
  if (!flags.n_outcomes.empty()) {
    fields.n_outcomes = static_cast<int>(
        branchlab::parse_positive_value(flags.n_outcomes, "n_outcomes"));
  }
  if (!flags.n_runs.empty()) fields.run_counts = branchlab::parse_run_values(flags.n_runs);
  if (!flags.epsilon.empty()) fields.epsilon = branchlab::parse_rational(flags.epsilon);
  if (!flags.delta.empty()) fields.delta = branchlab::parse_rational(flags.delta);
  if (!flags.seed.empty()) fields.seed = branchlab::parse_seed_value(flags.seed);
  if (!flags.k_cap.empty()) {
    fields.k_cap = branchlab::parse_positive_value(flags.k_cap, "k_cap");
  }
  return fields;
}

branchlab::RunOptions assemble_options(const CliFlags& flags) {
  branchlab::RunOptions options;
  if (!flags.threads.empty()) {
    options.num_threads = static_cast<int>(
        branchlab::parse_positive_value(flags.threads, "threads"));
  }
  if (const char* env = std::getenv("BRANCHLAB_CLASS_CAP")) {
    options.class_cap = branchlab::parse_positive_value(env, "BRANCHLAB_CLASS_CAP");
  }
  if (!flags.class_cap.empty()) {
    options.class_cap = branchlab::parse_positive_value(flags.class_cap, "class_cap");
  }
  return options;
}

int run_command(branchlab::Command command, const CliFlags& flags) {
  const branchlab::ScenarioFields fields = assemble_fields(command, flags);
  const branchlab::ScenarioConfig config = branchlab::validate_scenario(fields);
  const branchlab::RunOptions options = assemble_options(flags);

  const branchlab::ResultBundle bundle = branchlab::run_scenario(config, options);
  branchlab::write_result_files(bundle, flags.out_dir);

  std::cout << bundle.summary;
  const std::filesystem::path dir(flags.out_dir);
  std::cout << "wrote " << (dir / "results.csv").string() << " and "
            << (dir / "results.json").string();
  if (bundle.svg) std::cout << " and " << (dir / "plot.svg").string();
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"branchlab: exact branch statistics of repeated quantum measurements"};
  app.require_subcommand(1);

  CliFlags flags;
  const auto add_common = [&flags](CLI::App* sub) {
    sub->add_option("--scenario", flags.scenario_path, "scenario file to run");
    sub->add_option("--q", flags.q, "outcome weights, e.g. '1/2,1/2'");
    sub->add_option("--q-b", flags.q_b, "second outcome weights (validity-joint)");
    sub->add_option("--n-outcomes", flags.n_outcomes,
                    "outcome count without weights (achievable-set)");
    sub->add_option("--n-runs", flags.n_runs, "repetition count N, or list for typicality");
    sub->add_option("--epsilon", flags.epsilon, "frequency window half-width");
    sub->add_option("--delta", flags.delta, "outside-weight threshold");
    sub->add_option("--seed", flags.seed, "64-bit sampler seed");
    sub->add_option("--k-cap", flags.k_cap, "per-class valid-count cap");
    sub->add_option("--class-cap", flags.class_cap, "enumeration cap on branch classes");
    sub->add_option("--out-dir", flags.out_dir, "directory for results.csv/results.json");
    sub->add_option("--threads", flags.threads, "worker threads for class scans");
  };

  const std::vector<std::pair<branchlab::Command, const char*>> commands = {
      {branchlab::Command::typicality,
       "exact branch weight inside/outside a frequency window"},
      {branchlab::Command::branch_stats,
       "enumerate branch classes with multiplicities and weights"},
      {branchlab::Command::validity_feasibility,
       "search for a validity assignment matching the Born target"},
      {branchlab::Command::validity_joint,
       "certificate that one assignment cannot match two targets"},
      {branchlab::Command::achievable_set,
       "all frequency vectors reachable by capped assignments"},
      {branchlab::Command::collapse_sample,
       "seeded single-outcome sampling baseline"},
      {branchlab::Command::chain_demo,
       "measurement-chain derivation transcript"},
  };
  for (const auto& [command, description] : commands) {
    CLI::App* sub = app.add_subcommand(branchlab::to_string(command), description);
    add_common(sub);
    sub->callback([command, &flags] {
      const int status = run_command(command, flags);
      if (status != 0) std::exit(status);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    return app.exit(error);
  } catch (const branchlab::Error& error) {
    std::cerr << "error: " << error.what() << "\n";
    return branchlab::exit_code_for(error.kind());
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
