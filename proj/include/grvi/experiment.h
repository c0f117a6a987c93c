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

// Batch benchmark runner: experiment configs, (algorithm x seed) grids, trace
// files and the summary table.
//
// Config grammar (YAML; JSON flow syntax is accepted as well):
//
//   problem:                 # exactly one problem section
//     type: logistic         # logistic | sun | affine | saddle
//     N: 100                 # per-type keys, see ListProblems()
//     m: 300
//   algorithms:              # non-empty list
//     - alg2                 # bare name: default parameters
//     - egraal: {lambda0: 1, lambda_max: 1}
//     - alg1: {c: 1, p: 0.5, label: alg1_sqrt}
//   tol: 1e-3                # natural-residual tolerance, > 0
//   max_iter: 100000
//   record_every: 1
//   output_dir: results
//   seed: 1                  # starting-point seed, integer or list
//
// Unknown keys are errors. Every trace file starts with one '#'-prefixed JSON
// line holding the resolved config (output_dir excluded), the algorithm label
// and the seed, which is enough to regenerate the file.

#ifndef GRVI_EXPERIMENT_H_
#define GRVI_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "grvi/core.h"
#include "grvi/problems.h"
#include "grvi/solvers.h"

namespace grvi {

struct LogisticSpec {
  int num_samples = 100;
  int dim = 300;
  uint64_t seed = 1;
  RegWeightSource reg_source = RegWeightSource::kA;
};

struct SunSpec {
  int m = 300;
};

struct AffineSpec {
  int m = 50;
  uint64_t seed = 1;
  double modulus = 0.1;
};

struct SaddleSpec {
  int mx = 20;
  int ny = 20;
  uint64_t seed = 1;
  double weight = 0.1;
};

using ProblemSpec = std::variant<LogisticSpec, SunSpec, AffineSpec, SaddleSpec>;

struct Alg1Spec {
  PowerSchedule schedule;
};

struct FistaSpec {};

struct AlgorithmSpec {
  // Unique within a config; names the trace file.
  std::string label;
  std::variant<Alg1Spec, Alg2Config, EgraalConfig, FistaSpec> params;
};

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<AlgorithmSpec> algorithms;
  double tol = 1e-3;
  int64_t max_iter = 100000;
  int64_t record_every = 1;
  std::string output_dir = "results";
  std::vector<uint64_t> seeds = {1};
};

// Parses and validates a config document. Syntax errors carry the line and
// column; semantic errors name the offending key.
absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view text);
absl::StatusOr<ExperimentConfig> LoadConfigFile(const std::string& path);

// Compact JSON of the resolved config without output_dir. ParseConfig accepts
// it and yields the same config.
std::string ConfigToJson(const ExperimentConfig& config);

std::string_view ProblemTypeName(const ProblemSpec& spec);
std::string_view AlgorithmName(const AlgorithmSpec& spec);

// One line per supported problem / algorithm with its keys and defaults.
std::vector<std::string> ListProblems();
std::vector<std::string> ListAlgorithms();

absl::StatusOr<VIProblem> BuildProblem(const ProblemSpec& spec);

// Outcome of one (algorithm, seed) cell.
struct CellResult {
  std::string label;
  uint64_t seed = 0;
  // converged | max_iter | diverged | skipped | error
  std::string status;
  int64_t iterations = 0;
  std::optional<int64_t> iterations_to_tol;
  std::optional<double> final_natural_residual;
  std::optional<double> final_d_n;
  std::optional<double> final_objective;
  std::optional<double> relative_gap;
  std::optional<double> final_dist_sq;
  double wall_time_ms = 0.0;
  // File name relative to the output directory; empty for skipped cells.
  std::string trace_file;
  std::string notes;
};

struct ExperimentSummary {
  std::vector<CellResult> cells;
  // Smallest objective over all traces of the experiment.
  std::optional<double> reference_objective;
  std::string summary_file;

  // True iff every cell that was not skipped converged.
  bool AllConverged() const;
};

struct RunOptions {
  int jobs = 1;
  // Overrides config.output_dir when set.
  std::optional<std::string> output_dir;
};

// Runs every (algorithm, seed) cell, up to `jobs` at a time, and writes
// <label>_seed<seed>.csv per cell plus summary.csv. A diverged or failed run
// is recorded in the summary; only I/O errors and invalid configs fail.
absl::StatusOr<ExperimentSummary> RunExperiment(const ExperimentConfig& config,
                                                const RunOptions& options = {});

// Trace file contents of one cell without running the whole grid. `result`
// receives the cell outcome when non-null.
absl::StatusOr<std::string> RenderTrace(const ExperimentConfig& config,
                                        const VIProblem& problem,
                                        const AlgorithmSpec& algorithm,
                                        uint64_t seed,
                                        CellResult* result = nullptr);

struct ReplayReport {
  bool identical = false;
  int64_t rows = 0;
  // 1-based line of the first difference, if any.
  std::optional<int64_t> first_mismatch_line;
  std::string message;
};

// Rebuilds the config from a trace file header, regenerates the trace and
// compares it with the file, ignoring the elapsed_ms column.
absl::StatusOr<ReplayReport> ReplayTraceFile(const std::string& path);

// Trace text with the elapsed_ms column blanked, for comparisons.
std::string StripTiming(std::string_view trace_text);

}  // namespace grvi

#endif  // GRVI_EXPERIMENT_H_
