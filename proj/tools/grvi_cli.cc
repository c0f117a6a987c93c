// Copyright 2026 The grvi Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end of the benchmark runner.
//
//   grvi run <config-file> [--jobs N] [--output DIR]
//   grvi list-problems
//   grvi list-algorithms
//   grvi replay <trace.csv>
//
// The output directory is taken from --output, else from the GRVI_OUTPUT_DIR
// environment variable, else from the config. `run` exits with 0 iff every
// run that was not skipped converged; `replay` exits with 0 iff the
// regenerated trace matches the file.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "absl/strings/str_format.h"
#include "grvi/experiment.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitError = 2;

int RunCommand(const std::string& config_path, int jobs,
               const std::string& output_flag) {
  absl::StatusOr<grvi::ExperimentConfig> config =
      grvi::LoadConfigFile(config_path);
  if (!config.ok()) {
    std::cerr << "error: " << config.status().message() << "\n";
    return kExitError;
  }
  grvi::RunOptions options;
  options.jobs = jobs;
  if (!output_flag.empty()) {
    options.output_dir = output_flag;
  } else if (const char* env = std::getenv("GRVI_OUTPUT_DIR");
             env != nullptr && *env != '\0') {
    options.output_dir = env;
  }
  absl::StatusOr<grvi::ExperimentSummary> summary =
      grvi::RunExperiment(*config, options);
  if (!summary.ok()) {
    std::cerr << "error: " << summary.status().message() << "\n";
    return kExitError;
  }
  for (const grvi::CellResult& cell : summary->cells) {
    std::cout << absl::StrFormat(
        "%-12s seed=%-6d %-10s iterations=%-9d residual=%-12s %s\n",
        cell.label, cell.seed, cell.status, cell.iterations,
        cell.final_natural_residual.has_value()
            ? absl::StrFormat("%.3e", *cell.final_natural_residual)
            : "-",
        cell.notes);
  }
  std::cout << "summary: " << summary->summary_file << "\n";
  return summary->AllConverged() ? 0 : kExitFailure;
}

int ReplayCommand(const std::string& trace_path) {
  absl::StatusOr<grvi::ReplayReport> report =
      grvi::ReplayTraceFile(trace_path);
  if (!report.ok()) {
    std::cerr << "error: " << report.status().message() << "\n";
    return kExitError;
  }
  std::cout << report->message << "\n";
  return report->identical ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Golden-ratio variational inequality benchmark runner"};
  app.require_subcommand(1);

  std::string config_path;
  int jobs = 1;
  std::string output_dir;
  CLI::App* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "Experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--jobs,-j", jobs, "Concurrent runs")
      ->check(CLI::PositiveNumber);
  run->add_option("--output,-o", output_dir,
                  "Output directory (overrides GRVI_OUTPUT_DIR and config)");

  CLI::App* list_problems =
      app.add_subcommand("list-problems", "List problem types and keys");
  CLI::App* list_algorithms =
      app.add_subcommand("list-algorithms", "List algorithms and defaults");

  std::string trace_path;
  CLI::App* replay = app.add_subcommand(
      "replay", "Regenerate a trace file from its header and compare");
  replay->add_option("trace", trace_path, "Trace CSV file")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (*run) return RunCommand(config_path, jobs, output_dir);
  if (*list_problems) {
    for (const std::string& line : grvi::ListProblems()) {
      std::cout << line << "\n";
    }
    return 0;
  }
  if (*list_algorithms) {
    for (const std::string& line : grvi::ListAlgorithms()) {
      std::cout << line << "\n";
    }
    return 0;
  }
  if (*replay) return ReplayCommand(trace_path);
  return kExitError;
}
