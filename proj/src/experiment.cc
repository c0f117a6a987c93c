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

#include "grvi/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "grvi/metrics.h"
#include "json.hpp"
#include "yaml-cpp/yaml.h"

namespace grvi {
namespace {

using Json = nlohmann::json;

constexpr char kRngName[] = "mt19937_64";
constexpr char kTraceColumns[] =
    "iter,natural_residual,d_n,objective,stepsize,dist_sq,elapsed_ms";
constexpr char kSummaryColumns[] =
    "algorithm,seed,status,iterations,iterations_to_tol,"
    "final_natural_residual,final_d_n,final_objective,reference_objective,"
    "relative_gap,final_dist_sq,wall_time_ms,trace_file,notes";

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// ---------------------------------------------------------------------------
// YAML helpers
// ---------------------------------------------------------------------------

std::string Where(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) return "";
  return absl::StrFormat(" (line %d, column %d)", mark.line + 1,
                         mark.column + 1);
}

absl::Status KeyError(const YAML::Node& node, std::string_view key,
                      std::string_view what) {
  return absl::InvalidArgumentError(absl::StrFormat(
      "'%s' %s%s", std::string(key), std::string(what), Where(node)));
}

std::string JoinKeys(std::initializer_list<std::string_view> keys) {
  std::string joined;
  for (std::string_view key : keys) {
    if (!joined.empty()) joined += ", ";
    joined += key;
  }
  return joined;
}

absl::Status CheckKeys(const YAML::Node& map, std::string_view context,
                       std::initializer_list<std::string_view> allowed) {
  for (const auto& entry : map) {
    const std::string key = entry.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "unknown key '%s' in %s%s; allowed: %s", key, std::string(context),
          Where(entry.first), JoinKeys(allowed)));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<double> GetDouble(const YAML::Node& node, std::string_view key) {
  double value = 0.0;
  if (!node.IsScalar() || !YAML::convert<double>::decode(node, value) ||
      !std::isfinite(value)) {
    return KeyError(node, key, "must be a finite number");
  }
  return value;
}

absl::StatusOr<int64_t> GetInt(const YAML::Node& node, std::string_view key) {
  int64_t value = 0;
  if (!node.IsScalar() || !YAML::convert<int64_t>::decode(node, value)) {
    return KeyError(node, key, "must be an integer");
  }
  return value;
}

absl::StatusOr<int> GetPositiveInt(const YAML::Node& node,
                                   std::string_view key) {
  absl::StatusOr<int64_t> value = GetInt(node, key);
  if (!value.ok()) return value.status();
  if (*value < 1 || *value > std::numeric_limits<int>::max()) {
    return KeyError(node, key, "must be a positive integer");
  }
  return static_cast<int>(*value);
}

absl::StatusOr<uint64_t> GetSeed(const YAML::Node& node, std::string_view key) {
  absl::StatusOr<int64_t> value = GetInt(node, key);
  if (!value.ok()) return value.status();
  if (*value < 0) return KeyError(node, key, "must be nonnegative");
  return static_cast<uint64_t>(*value);
}

absl::StatusOr<bool> GetBool(const YAML::Node& node, std::string_view key) {
  bool value = false;
  if (!node.IsScalar() || !YAML::convert<bool>::decode(node, value)) {
    return KeyError(node, key, "must be true or false");
  }
  return value;
}

absl::StatusOr<std::string> GetString(const YAML::Node& node,
                                      std::string_view key) {
  if (!node.IsScalar()) return KeyError(node, key, "must be a string");
  return node.as<std::string>();
}

// Assigns `parsed` to `*out` when the key is present.
#define GRVI_READ(node, key, getter, out)                 \
  if (const YAML::Node sub = (node)[key]; sub) {          \
    auto parsed = getter(sub, key);                       \
    if (!parsed.ok()) return parsed.status();             \
    *(out) = *parsed;                                     \
  }

absl::StatusOr<ProblemSpec> ParseProblem(const YAML::Node& node) {
  if (!node.IsMap()) return KeyError(node, "problem", "must be a mapping");
  const YAML::Node type_node = node["type"];
  if (!type_node) return KeyError(node, "problem", "needs a 'type'");
  absl::StatusOr<std::string> type = GetString(type_node, "type");
  if (!type.ok()) return type.status();

  if (*type == "logistic") {
    if (absl::Status s =
            CheckKeys(node, "problem", {"type", "N", "m", "seed", "reg_source"});
        !s.ok()) {
      return s;
    }
    LogisticSpec spec;
    GRVI_READ(node, "N", GetPositiveInt, &spec.num_samples);
    GRVI_READ(node, "m", GetPositiveInt, &spec.dim);
    GRVI_READ(node, "seed", GetSeed, &spec.seed);
    std::string source = "A";
    GRVI_READ(node, "reg_source", GetString, &source);
    if (source == "A") {
      spec.reg_source = RegWeightSource::kA;
    } else if (source == "K") {
      spec.reg_source = RegWeightSource::kK;
    } else {
      return KeyError(node["reg_source"], "reg_source", "must be A or K");
    }
    return spec;
  }
  if (*type == "sun") {
    if (absl::Status s = CheckKeys(node, "problem", {"type", "m"}); !s.ok()) {
      return s;
    }
    SunSpec spec;
    GRVI_READ(node, "m", GetPositiveInt, &spec.m);
    return spec;
  }
  if (*type == "affine") {
    if (absl::Status s =
            CheckKeys(node, "problem", {"type", "m", "seed", "modulus"});
        !s.ok()) {
      return s;
    }
    AffineSpec spec;
    GRVI_READ(node, "m", GetPositiveInt, &spec.m);
    GRVI_READ(node, "seed", GetSeed, &spec.seed);
    GRVI_READ(node, "modulus", GetDouble, &spec.modulus);
    return spec;
  }
  if (*type == "saddle") {
    if (absl::Status s =
            CheckKeys(node, "problem", {"type", "mx", "ny", "seed", "weight"});
        !s.ok()) {
      return s;
    }
    SaddleSpec spec;
    GRVI_READ(node, "mx", GetPositiveInt, &spec.mx);
    GRVI_READ(node, "ny", GetPositiveInt, &spec.ny);
    GRVI_READ(node, "seed", GetSeed, &spec.seed);
    GRVI_READ(node, "weight", GetDouble, &spec.weight);
    return spec;
  }
  return KeyError(type_node, "type",
                  absl::StrFormat("names unknown problem '%s'; expected "
                                  "logistic, sun, affine or saddle",
                                  *type));
}

absl::StatusOr<AlgorithmSpec> ParseAlgorithm(const YAML::Node& node) {
  std::string name;
  YAML::Node params;
  if (node.IsScalar()) {
    name = node.as<std::string>();
  } else if (node.IsMap() && node.size() == 1) {
    name = node.begin()->first.as<std::string>();
    params = node.begin()->second;
    if (!params.IsNull() && !params.IsMap()) {
      return KeyError(params, name, "parameters must be a mapping");
    }
  } else {
    return absl::InvalidArgumentError(absl::StrCat(
        "each algorithm must be a name or a single-key mapping", Where(node)));
  }
  const YAML::Node empty;
  const YAML::Node& p = params.IsMap() ? params : empty;

  AlgorithmSpec spec;
  spec.label = name;
  if (name == "alg1") {
    if (p.IsMap()) {
      if (absl::Status s = CheckKeys(p, "alg1", {"c", "p", "label"}); !s.ok()) {
        return s;
      }
    }
    Alg1Spec alg;
    GRVI_READ(p, "c", GetDouble, &alg.schedule.c);
    GRVI_READ(p, "p", GetDouble, &alg.schedule.p);
    spec.params = alg;
  } else if (name == "alg2") {
    if (p.IsMap()) {
      if (absl::Status s = CheckKeys(
              p, "alg2",
              {"lambda0", "mu", "rho", "enforce_rate_regime", "label"});
          !s.ok()) {
        return s;
      }
    }
    Alg2Config alg;
    GRVI_READ(p, "lambda0", GetDouble, &alg.lambda0);
    GRVI_READ(p, "mu", GetDouble, &alg.mu);
    GRVI_READ(p, "rho", GetDouble, &alg.rho);
    GRVI_READ(p, "enforce_rate_regime", GetBool, &alg.enforce_rate_regime);
    spec.params = alg;
  } else if (name == "egraal") {
    if (p.IsMap()) {
      if (absl::Status s = CheckKeys(
              p, "egraal", {"lambda0", "lambda_max", "phi", "label"});
          !s.ok()) {
        return s;
      }
    }
    EgraalConfig alg;
    GRVI_READ(p, "lambda0", GetDouble, &alg.lambda0);
    GRVI_READ(p, "lambda_max", GetDouble, &alg.lambda_max);
    GRVI_READ(p, "phi", GetDouble, &alg.phi);
    spec.params = alg;
  } else if (name == "fista") {
    if (p.IsMap()) {
      if (absl::Status s = CheckKeys(p, "fista", {"label"}); !s.ok()) return s;
    }
    spec.params = FistaSpec{};
  } else {
    return absl::InvalidArgumentError(absl::StrFormat(
        "unknown algorithm '%s'%s; expected alg1, alg2, egraal or fista", name,
        Where(node)));
  }
  GRVI_READ(p, "label", GetString, &spec.label);
  return spec;
}

#undef GRVI_READ

absl::StatusOr<std::vector<uint64_t>> ParseSeeds(const YAML::Node& node) {
  std::vector<uint64_t> seeds;
  if (node.IsSequence()) {
    for (const YAML::Node& item : node) {
      absl::StatusOr<uint64_t> seed = GetSeed(item, "seed");
      if (!seed.ok()) return seed.status();
      seeds.push_back(*seed);
    }
  } else {
    absl::StatusOr<uint64_t> seed = GetSeed(node, "seed");
    if (!seed.ok()) return seed.status();
    seeds.push_back(*seed);
  }
  return seeds;
}

absl::Status Annotate(const absl::Status& status, std::string_view context) {
  if (status.ok()) return status;
  return absl::Status(status.code(),
                      absl::StrCat(std::string(context), ": ", status.message()));
}

absl::Status ValidateConfig(const ExperimentConfig& config) {
  if (absl::Status s = std::visit(
          Overloaded{
              [](const LogisticSpec& spec) -> absl::Status {
                if (spec.num_samples < 1 || spec.dim < 1) {
                  return absl::InvalidArgumentError(
                      "logistic problem sizes must be positive");
                }
                return absl::OkStatus();
              },
              [](const SunSpec& spec) -> absl::Status {
                if (spec.m < 1) {
                  return absl::InvalidArgumentError(
                      "sun problem size must be positive");
                }
                return absl::OkStatus();
              },
              [](const AffineSpec& spec) -> absl::Status {
                if (spec.m < 1) {
                  return absl::InvalidArgumentError(
                      "affine problem size must be positive");
                }
                if (!(spec.modulus > 0.0) || !std::isfinite(spec.modulus)) {
                  return absl::InvalidArgumentError(
                      "affine modulus must be positive");
                }
                return absl::OkStatus();
              },
              [](const SaddleSpec& spec) -> absl::Status {
                if (spec.mx < 1 || spec.ny < 1) {
                  return absl::InvalidArgumentError(
                      "saddle problem sizes must be positive");
                }
                if (!(spec.weight > 0.0) || !std::isfinite(spec.weight)) {
                  return absl::InvalidArgumentError(
                      "saddle weight must be positive");
                }
                return absl::OkStatus();
              },
          },
          config.problem);
      !s.ok()) {
    return s;
  }
  if (config.algorithms.empty()) {
    return absl::InvalidArgumentError("at least one algorithm is required");
  }
  std::set<std::string> labels;
  for (const AlgorithmSpec& algorithm : config.algorithms) {
    if (algorithm.label.empty() ||
        algorithm.label.find_first_of("/\\,") != std::string::npos) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "algorithm label '%s' must be non-empty without '/', '\\' or ','",
          algorithm.label));
    }
    if (!labels.insert(algorithm.label).second) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "duplicate algorithm label '%s'; set 'label' to tell runs apart",
          algorithm.label));
    }
    const absl::Status s = std::visit(
        Overloaded{
            [](const Alg1Spec& alg) {
              return ValidateSchedule(StepsizeSchedule(alg.schedule));
            },
            [](const Alg2Config& alg) { return ValidateAlg2Config(alg); },
            [](const EgraalConfig& alg) { return ValidateEgraalConfig(alg); },
            [](const FistaSpec&) { return absl::OkStatus(); },
        },
        algorithm.params);
    if (!s.ok()) {
      return Annotate(s, absl::StrFormat("algorithm '%s'", algorithm.label));
    }
  }
  if (!(config.tol > 0.0) || !std::isfinite(config.tol)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("tol must be positive, got %g", config.tol));
  }
  if (config.max_iter < 1) {
    return absl::InvalidArgumentError("max_iter must be a positive integer");
  }
  if (config.record_every < 1) {
    return absl::InvalidArgumentError(
        "record_every must be a positive integer");
  }
  if (config.seeds.empty()) {
    return absl::InvalidArgumentError("at least one seed is required");
  }
  const std::set<uint64_t> unique(config.seeds.begin(), config.seeds.end());
  if (unique.size() != config.seeds.size()) {
    return absl::InvalidArgumentError("seeds must be distinct");
  }
  if (config.output_dir.empty()) {
    return absl::InvalidArgumentError("output_dir must not be empty");
  }
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

Json ProblemJson(const ProblemSpec& problem) {
  return std::visit(
      Overloaded{
          [](const LogisticSpec& spec) {
            return Json{{"type", "logistic"},
                        {"N", spec.num_samples},
                        {"m", spec.dim},
                        {"seed", spec.seed},
                        {"reg_source",
                         spec.reg_source == RegWeightSource::kA ? "A" : "K"}};
          },
          [](const SunSpec& spec) { return Json{{"type", "sun"}, {"m", spec.m}}; },
          [](const AffineSpec& spec) {
            return Json{{"type", "affine"},
                        {"m", spec.m},
                        {"seed", spec.seed},
                        {"modulus", spec.modulus}};
          },
          [](const SaddleSpec& spec) {
            return Json{{"type", "saddle"},
                        {"mx", spec.mx},
                        {"ny", spec.ny},
                        {"seed", spec.seed},
                        {"weight", spec.weight}};
          },
      },
      problem);
}

Json AlgorithmJson(const AlgorithmSpec& algorithm) {
  Json params = std::visit(
      Overloaded{
          [](const Alg1Spec& alg) {
            return Json{{"c", alg.schedule.c}, {"p", alg.schedule.p}};
          },
          [](const Alg2Config& alg) {
            Json j{{"lambda0", alg.lambda0},
                   {"mu", alg.mu},
                   {"enforce_rate_regime", alg.enforce_rate_regime}};
            if (alg.rho.has_value()) j["rho"] = *alg.rho;
            return j;
          },
          [](const EgraalConfig& alg) {
            return Json{{"lambda0", alg.lambda0},
                        {"lambda_max", alg.lambda_max},
                        {"phi", alg.phi}};
          },
          [](const FistaSpec&) { return Json::object(); },
      },
      algorithm.params);
  params["label"] = algorithm.label;
  return Json{{std::string(AlgorithmName(algorithm)), params}};
}

Json ConfigJson(const ExperimentConfig& config) {
  Json algorithms = Json::array();
  for (const AlgorithmSpec& algorithm : config.algorithms) {
    algorithms.push_back(AlgorithmJson(algorithm));
  }
  return Json{{"problem", ProblemJson(config.problem)},
              {"algorithms", algorithms},
              {"tol", config.tol},
              {"max_iter", config.max_iter},
              {"record_every", config.record_every},
              {"seed", config.seeds}};
}

std::string FormatDouble(double value) {
  return absl::StrFormat("%.17g", value);
}

std::string FormatOptional(const std::optional<double>& value) {
  return value.has_value() ? FormatDouble(*value) : std::string();
}

// Splits on '\n'; a trailing newline yields a final empty piece.
std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (true) {
    const size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      return lines;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
}

// Quotes a CSV field when it contains a delimiter or a quote.
std::string CsvField(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) {
    return std::string(text);
  }
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c == '\n' ? ' ' : c;
  }
  quoted += '"';
  return quoted;
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

std::optional<std::string> SkipReason(const VIProblem& problem,
                                      const AlgorithmSpec& algorithm) {
  if (!std::holds_alternative<FistaSpec>(algorithm.params)) return std::nullopt;
  if (!problem.has_objective()) {
    return "skipped: problem has no objective to minimize";
  }
  if (!problem.op.lipschitz.has_value()) {
    return "skipped: Lipschitz constant of the operator is unknown";
  }
  return std::nullopt;
}

absl::StatusOr<RunResult> RunAlgorithm(const ExperimentConfig& config,
                                       const VIProblem& problem,
                                       const AlgorithmSpec& algorithm,
                                       uint64_t seed) {
  SolverConfig solver;
  solver.tol = config.tol;
  solver.max_iter = config.max_iter;
  solver.record_every = config.record_every;
  const Vector x1 = RandomPoint(problem.dim, seed);
  return std::visit(
      Overloaded{
          [&](const Alg1Spec& alg) {
            return RunGoldenRatioDiminishing(problem, alg.schedule, x1, x1,
                                             solver);
          },
          [&](const Alg2Config& alg) {
            return RunGoldenRatioAdaptive(problem, alg, x1, x1, x1, solver);
          },
          [&](const EgraalConfig& alg) {
            return RunExplicitGoldenRatio(problem, alg, x1, x1, solver);
          },
          [&](const FistaSpec&) {
            return RunFista(problem, *problem.op.lipschitz, x1, solver);
          },
      },
      algorithm.params);
}

std::string TraceFileName(const AlgorithmSpec& algorithm, uint64_t seed) {
  return absl::StrFormat("%s_seed%d.csv", algorithm.label, seed);
}

struct CellOutput {
  CellResult result;
  std::optional<double> best_objective;
};

absl::StatusOr<std::string> RenderCell(const ExperimentConfig& config,
                                       const VIProblem& problem,
                                       const AlgorithmSpec& algorithm,
                                       uint64_t seed, CellOutput* out) {
  CellResult& result = out->result;
  result.label = algorithm.label;
  result.seed = seed;
  if (std::optional<std::string> reason = SkipReason(problem, algorithm)) {
    result.status = "skipped";
    result.notes = *reason;
    return absl::FailedPreconditionError(*reason);
  }

  const auto start = std::chrono::steady_clock::now();
  absl::StatusOr<RunResult> run =
      RunAlgorithm(config, problem, algorithm, seed);
  result.wall_time_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  if (!run.ok()) {
    result.status = "error";
    result.notes = std::string(run.status().message());
    return run.status();
  }

  const Json header{{"algorithm", algorithm.label},
                    {"seed", seed},
                    {"rng", kRngName},
                    {"problem", problem.name},
                    {"dim", problem.dim},
                    {"config", ConfigJson(config)}};
  std::string text = absl::StrCat("# ", header.dump(), "\n", kTraceColumns,
                                  "\n");
  for (const TraceRecord& row : run->trace) {
    absl::StrAppend(&text, row.iter, ",", FormatDouble(row.natural_residual),
                    ",", FormatDouble(row.d_n), ",",
                    FormatOptional(row.objective), ",",
                    FormatDouble(row.stepsize), ",",
                    FormatOptional(row.dist_to_solution_sq), ",",
                    absl::StrFormat("%.3f", row.elapsed_ms), "\n");
    if (row.objective.has_value() && std::isfinite(*row.objective) &&
        (!out->best_objective.has_value() ||
         *row.objective < *out->best_objective)) {
      out->best_objective = row.objective;
    }
  }

  result.status = std::string(TerminationName(run->status));
  result.iterations = run->iterations;
  result.iterations_to_tol = IterationsToTolerance(run->trace, config.tol);
  if (!run->trace.empty()) {
    const TraceRecord& last = run->trace.back();
    result.final_natural_residual = last.natural_residual;
    result.final_d_n = last.d_n;
    result.final_objective = last.objective;
    result.final_dist_sq = last.dist_to_solution_sq;
  }
  if (run->status == Termination::kDiverged) {
    result.notes = "iterates left the divergence bound or became non-finite";
  }
  return text;
}

absl::Status WriteFile(const std::filesystem::path& path,
                       std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrFormat("cannot open '%s' for writing", path.string()));
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) {
    return absl::DataLossError(
        absl::StrFormat("failed writing '%s'", path.string()));
  }
  return absl::OkStatus();
}

std::string SummaryText(const ExperimentConfig& config,
                        const ExperimentSummary& summary) {
  Json header{{"config", ConfigJson(config)}, {"rng", kRngName}};
  if (summary.reference_objective.has_value()) {
    header["reference_objective"] = *summary.reference_objective;
  }
  std::string text =
      absl::StrCat("# ", header.dump(), "\n", kSummaryColumns, "\n");
  for (const CellResult& cell : summary.cells) {
    absl::StrAppend(
        &text, CsvField(cell.label), ",", cell.seed, ",", cell.status, ",",
        cell.iterations, ",",
        cell.iterations_to_tol.has_value()
            ? absl::StrCat(*cell.iterations_to_tol)
            : std::string(),
        ",", FormatOptional(cell.final_natural_residual), ",",
        FormatOptional(cell.final_d_n), ",",
        FormatOptional(cell.final_objective), ",",
        FormatOptional(summary.reference_objective), ",",
        FormatOptional(cell.relative_gap), ",",
        FormatOptional(cell.final_dist_sq), ",",
        absl::StrFormat("%.3f", cell.wall_time_ms), ",",
        CsvField(cell.trace_file), ",", CsvField(cell.notes), "\n");
  }
  return text;
}

}  // namespace

absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    return absl::InvalidArgumentError(
        absl::StrFormat("config syntax error at line %d, column %d: %s",
                        e.mark.line + 1, e.mark.column + 1, e.msg));
  }
  if (!root.IsMap()) {
    return absl::InvalidArgumentError("config must be a mapping of keys");
  }
  try {
    if (absl::Status s = CheckKeys(root, "config",
                                   {"problem", "algorithms", "tol", "max_iter",
                                    "record_every", "output_dir", "seed"});
        !s.ok()) {
      return s;
    }
    ExperimentConfig config;
    const YAML::Node problem = root["problem"];
    if (!problem) return absl::InvalidArgumentError("missing 'problem'");
    absl::StatusOr<ProblemSpec> spec = ParseProblem(problem);
    if (!spec.ok()) return spec.status();
    config.problem = *spec;

    const YAML::Node algorithms = root["algorithms"];
    if (!algorithms) return absl::InvalidArgumentError("missing 'algorithms'");
    if (!algorithms.IsSequence()) {
      return KeyError(algorithms, "algorithms", "must be a list");
    }
    for (const YAML::Node& item : algorithms) {
      absl::StatusOr<AlgorithmSpec> algorithm = ParseAlgorithm(item);
      if (!algorithm.ok()) return algorithm.status();
      config.algorithms.push_back(*std::move(algorithm));
    }

    if (const YAML::Node n = root["tol"]; n) {
      absl::StatusOr<double> v = GetDouble(n, "tol");
      if (!v.ok()) return v.status();
      config.tol = *v;
    }
    if (const YAML::Node n = root["max_iter"]; n) {
      absl::StatusOr<int64_t> v = GetInt(n, "max_iter");
      if (!v.ok()) return v.status();
      config.max_iter = *v;
    }
    if (const YAML::Node n = root["record_every"]; n) {
      absl::StatusOr<int64_t> v = GetInt(n, "record_every");
      if (!v.ok()) return v.status();
      config.record_every = *v;
    }
    if (const YAML::Node n = root["output_dir"]; n) {
      absl::StatusOr<std::string> v = GetString(n, "output_dir");
      if (!v.ok()) return v.status();
      config.output_dir = *v;
    }
    if (const YAML::Node n = root["seed"]; n) {
      absl::StatusOr<std::vector<uint64_t>> v = ParseSeeds(n);
      if (!v.ok()) return v.status();
      config.seeds = *v;
    }
    if (absl::Status s = ValidateConfig(config); !s.ok()) return s;
    return config;
  } catch (const YAML::Exception& e) {
    return absl::InvalidArgumentError(
        absl::StrFormat("malformed config at line %d, column %d: %s",
                        e.mark.line + 1, e.mark.column + 1, e.msg));
  }
}

absl::StatusOr<ExperimentConfig> LoadConfigFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(
        absl::StrFormat("cannot open config file '%s'", path));
  }
  std::ostringstream text;
  text << in.rdbuf();
  absl::StatusOr<ExperimentConfig> config = ParseConfig(text.str());
  if (!config.ok()) return Annotate(config.status(), path);
  return config;
}

std::string ConfigToJson(const ExperimentConfig& config) {
  return ConfigJson(config).dump();
}

std::string_view ProblemTypeName(const ProblemSpec& spec) {
  return std::visit(Overloaded{
                        [](const LogisticSpec&) { return "logistic"; },
                        [](const SunSpec&) { return "sun"; },
                        [](const AffineSpec&) { return "affine"; },
                        [](const SaddleSpec&) { return "saddle"; },
                    },
                    spec);
}

std::string_view AlgorithmName(const AlgorithmSpec& spec) {
  return std::visit(Overloaded{
                        [](const Alg1Spec&) { return "alg1"; },
                        [](const Alg2Config&) { return "alg2"; },
                        [](const EgraalConfig&) { return "egraal"; },
                        [](const FistaSpec&) { return "fista"; },
                    },
                    spec.params);
}

std::vector<std::string> ListProblems() {
  return {
      "logistic  N=100 m=300 seed=1 reg_source=A  sparse logistic regression "
      "with an l1 term (objective and Lipschitz constant known)",
      "sun       m=300  nonlinear complementarity operator on the nonnegative "
      "orthant (no objective, no Lipschitz constant)",
      "affine    m=50 seed=1 modulus=0.1  strongly monotone affine VI on the "
      "nonnegative orthant with a planted solution",
      "saddle    mx=20 ny=20 seed=1 weight=0.1  bilinear saddle point with l1 "
      "terms on both blocks",
  };
}

std::vector<std::string> ListAlgorithms() {
  return {
      "alg1    c=1 p=0.5  golden ratio steps with lambda_n = c / n^p, "
      "0 < p <= 1",
      absl::StrFormat("alg2    lambda0=1 mu=%.17g rho=(unset) "
                      "enforce_rate_regime=false  golden ratio steps with "
                      "adaptive non-increasing stepsizes, 0 < mu < phi/2",
                      0.45 * kGoldenRatio),
      "egraal  lambda0=1 lambda_max=1 phi=1.618...  explicit golden ratio "
      "algorithm",
      "fista   (no parameters)  accelerated proximal gradient with stepsize "
      "1/L; needs an objective and a Lipschitz constant",
  };
}

absl::StatusOr<VIProblem> BuildProblem(const ProblemSpec& spec) {
  return std::visit(
      Overloaded{
          [](const LogisticSpec& s) -> absl::StatusOr<VIProblem> {
            absl::StatusOr<LogisticDataset> data = GenerateLogisticDataset(
                s.num_samples, s.dim, s.seed, s.reg_source);
            if (!data.ok()) return data.status();
            return LogisticProblem(
                std::make_shared<const LogisticDataset>(*std::move(data)));
          },
          [](const SunSpec& s) -> absl::StatusOr<VIProblem> {
            return BuildSunProblem(s.m);
          },
          [](const AffineSpec& s) -> absl::StatusOr<VIProblem> {
            absl::StatusOr<AffineVISpec> affine =
                GenerateAffineVI(s.m, s.seed, s.modulus);
            if (!affine.ok()) return affine.status();
            return AffineVIProblem(
                std::make_shared<const AffineVISpec>(*std::move(affine)));
          },
          [](const SaddleSpec& s) -> absl::StatusOr<VIProblem> {
            return GenerateBilinearSaddle(s.mx, s.ny, s.seed, s.weight);
          },
      },
      spec);
}

bool ExperimentSummary::AllConverged() const {
  for (const CellResult& cell : cells) {
    if (cell.status != "skipped" && cell.status != "converged") return false;
  }
  return true;
}

absl::StatusOr<std::string> RenderTrace(const ExperimentConfig& config,
                                        const VIProblem& problem,
                                        const AlgorithmSpec& algorithm,
                                        uint64_t seed, CellResult* result) {
  CellOutput out;
  absl::StatusOr<std::string> text =
      RenderCell(config, problem, algorithm, seed, &out);
  if (result != nullptr) *result = out.result;
  return text;
}

absl::StatusOr<ExperimentSummary> RunExperiment(const ExperimentConfig& config,
                                                const RunOptions& options) {
  if (absl::Status s = ValidateConfig(config); !s.ok()) return s;
  const std::filesystem::path dir(options.output_dir.value_or(config.output_dir));
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(absl::StrFormat(
        "cannot create output directory '%s': %s", dir.string(), ec.message()));
  }
  absl::StatusOr<VIProblem> problem = BuildProblem(config.problem);
  if (!problem.ok()) return Annotate(problem.status(), "building the problem");

  struct Cell {
    const AlgorithmSpec* algorithm;
    uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const AlgorithmSpec& algorithm : config.algorithms) {
    for (uint64_t seed : config.seeds) cells.push_back({&algorithm, seed});
  }
  std::vector<CellOutput> outputs(cells.size());

  std::atomic<size_t> next{0};
  std::mutex error_mutex;
  absl::Status io_error;
  auto worker = [&] {
    for (size_t i = next++; i < cells.size(); i = next++) {
      CellOutput& out = outputs[i];
      absl::StatusOr<std::string> text = RenderCell(
          config, *problem, *cells[i].algorithm, cells[i].seed, &out);
      if (!text.ok()) continue;  // skip or solver error, already recorded
      const std::string name = TraceFileName(*cells[i].algorithm, cells[i].seed);
      if (absl::Status s = WriteFile(dir / name, *text); !s.ok()) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (io_error.ok()) io_error = s;
        continue;
      }
      out.result.trace_file = name;
    }
  };
  const size_t num_threads = std::clamp<size_t>(
      static_cast<size_t>(std::max(options.jobs, 1)), 1, cells.size());
  std::vector<std::thread> threads;
  for (size_t t = 1; t < num_threads; ++t) threads.emplace_back(worker);
  worker();
  for (std::thread& thread : threads) thread.join();
  if (!io_error.ok()) return io_error;

  ExperimentSummary summary;
  for (const CellOutput& out : outputs) {
    if (out.best_objective.has_value() &&
        (!summary.reference_objective.has_value() ||
         *out.best_objective < *summary.reference_objective)) {
      summary.reference_objective = out.best_objective;
    }
  }
  for (CellOutput& out : outputs) {
    CellResult& cell = out.result;
    if (cell.final_objective.has_value() &&
        summary.reference_objective.has_value()) {
      const double j_star = *summary.reference_objective;
      const double scale = j_star != 0.0 ? std::abs(j_star) : 1.0;
      cell.relative_gap = (*cell.final_objective - j_star) / scale;
    }
    summary.cells.push_back(std::move(cell));
  }
  const std::filesystem::path summary_path = dir / "summary.csv";
  if (absl::Status s = WriteFile(summary_path, SummaryText(config, summary));
      !s.ok()) {
    return s;
  }
  summary.summary_file = summary_path.string();
  return summary;
}

std::string StripTiming(std::string_view trace_text) {
  std::string stripped;
  stripped.reserve(trace_text.size());
  for (std::string_view line : SplitLines(trace_text)) {
    if (!line.empty() && line.front() != '#') {
      const size_t comma = line.rfind(',');
      if (comma != std::string_view::npos) line = line.substr(0, comma + 1);
    }
    stripped.append(line).append("\n");
  }
  return stripped;
}

absl::StatusOr<ReplayReport> ReplayTraceFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(
        absl::StrFormat("cannot open trace file '%s'", path));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string original = buffer.str();

  const size_t eol = original.find('\n');
  const std::string first_line = original.substr(0, eol);
  if (first_line.rfind("# ", 0) != 0) {
    return absl::InvalidArgumentError(
        "trace file does not start with a '# ' metadata line");
  }
  const Json header = Json::parse(first_line.substr(2), nullptr,
                                  /*allow_exceptions=*/false);
  if (header.is_discarded() || !header.is_object() ||
      !header.contains("config") || !header.contains("algorithm") ||
      !header.contains("seed") || !header["algorithm"].is_string() ||
      !header["seed"].is_number_unsigned()) {
    return absl::InvalidArgumentError(
        "trace header lacks config, algorithm or seed");
  }
  absl::StatusOr<ExperimentConfig> config =
      ParseConfig(header["config"].dump());
  if (!config.ok()) return Annotate(config.status(), "trace header config");
  const std::string label = header["algorithm"].get<std::string>();
  const uint64_t seed = header["seed"].get<uint64_t>();
  const auto algorithm =
      std::find_if(config->algorithms.begin(), config->algorithms.end(),
                   [&](const AlgorithmSpec& a) { return a.label == label; });
  if (algorithm == config->algorithms.end()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "trace header names algorithm '%s' missing from its config", label));
  }
  absl::StatusOr<VIProblem> problem = BuildProblem(config->problem);
  if (!problem.ok()) return problem.status();
  absl::StatusOr<std::string> regenerated =
      RenderTrace(*config, *problem, *algorithm, seed);
  if (!regenerated.ok()) return regenerated.status();

  const std::vector<std::string_view> expected = SplitLines(*regenerated);
  const std::vector<std::string_view> actual = SplitLines(original);
  ReplayReport report;
  report.rows = static_cast<int64_t>(expected.size()) - 3;  // header, columns, final newline
  const size_t common = std::min(expected.size(), actual.size());
  for (size_t i = 0; i < common; ++i) {
    if (StripTiming(expected[i]) != StripTiming(actual[i])) {
      report.first_mismatch_line = static_cast<int64_t>(i) + 1;
      break;
    }
  }
  if (!report.first_mismatch_line.has_value() &&
      expected.size() != actual.size()) {
    report.first_mismatch_line = static_cast<int64_t>(common) + 1;
  }
  report.identical = !report.first_mismatch_line.has_value();
  report.message =
      report.identical
          ? absl::StrFormat("%s: %d rows regenerated identically (elapsed_ms "
                            "ignored)",
                            path, report.rows)
          : absl::StrFormat("%s: regenerated trace differs at line %d", path,
                            *report.first_mismatch_line);
  return report;
}

}  // namespace grvi
