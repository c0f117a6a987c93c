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

// Acceptance suite: prints one PASS/FAIL line per criterion with the measured
// quantities and the runtime, and exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "absl/strings/str_format.h"
#include "grvi/core.h"
#include "grvi/experiment.h"
#include "grvi/metrics.h"
#include "grvi/problems.h"
#include "grvi/prox.h"
#include "grvi/solvers.h"

namespace grvi {
namespace {

namespace fs = std::filesystem;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string ConfigPath(const char* name) {
  return (fs::path(GRVI_SOURCE_DIR) / "configs" / name).string();
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// The affine test problem shared by criteria 3-6 and 10.
struct AffineCase {
  std::shared_ptr<const AffineVISpec> spec;
  VIProblem problem;
  double lipschitz = 0.0;  // largest singular value, computed independently
  Vector x1;
};

AffineCase MakeAffineCase(double modulus) {
  AffineCase c;
  c.spec = std::make_shared<const AffineVISpec>(
      *GenerateAffineVI(50, /*seed=*/7, modulus));
  c.problem = AffineVIProblem(c.spec);
  c.lipschitz = Eigen::JacobiSVD<Matrix>(c.spec->m).singularValues()(0);
  c.x1 = RandomPoint(50, 42);
  return c;
}

// ---------------------------------------------------------------------------
// 1. Prox oracle equivalence
// ---------------------------------------------------------------------------

double GridSoftThreshold(double z, double tau) {
  const double h = 1e-5;
  const double lo = std::min(0.0, z) - 0.01;
  const double hi = std::max(0.0, z) + 0.01;
  double best_y = lo, best = kInf;
  const long steps = static_cast<long>((hi - lo) / h) + 1;
  for (long k = 0; k <= steps; ++k) {
    const double y = lo + static_cast<double>(k) * h;
    const double v = tau * std::abs(y) + 0.5 * (y - z) * (y - z);
    if (v < best) {
      best = v;
      best_y = y;
    }
  }
  return best_y;
}

Outcome ProxEquivalence() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> z_dist(-3.0, 3.0);
  std::uniform_real_distribution<double> lambda_dist(0.01, 2.0);
  std::uniform_real_distribution<double> weight_dist(0.01, 1.5);
  double worst_grid = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double z = z_dist(rng), lambda = lambda_dist(rng),
                 weight = weight_dist(rng);
    Vector v(1);
    v << z;
    worst_grid = std::max(
        worst_grid, std::abs(ProxL1(v, lambda, weight)(0) -
                             GridSoftThreshold(z, lambda * weight)));
  }

  const int dim = 5;
  Vector lo(dim), hi(dim);
  for (int i = 0; i < dim; ++i) {
    lo(i) = -1.0 + 0.1 * i;
    hi(i) = lo(i) + 0.5 + 0.2 * i;
  }
  const std::vector<ProxKind> kinds = {ZeroFunction{}, L1Norm{0.7},
                                       NonnegIndicator{}, BoxIndicator{lo, hi}};
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_slack = kInf;
  for (const ProxKind& kind : kinds) {
    const ProxFunction prox = *MakeProxFunction(kind);
    for (int trial = 0; trial < 1000; ++trial) {
      Vector z(dim), x(dim);
      for (int i = 0; i < dim; ++i) z(i) = coord(rng);
      for (int i = 0; i < dim; ++i) x(i) = coord(rng);
      if (std::holds_alternative<NonnegIndicator>(kind)) x = x.cwiseAbs();
      if (std::holds_alternative<BoxIndicator>(kind)) {
        for (int i = 0; i < dim; ++i) x(i) = lo(i) + unit(rng) * (hi(i) - lo(i));
      }
      const double lambda = 0.05 + 2.95 * unit(rng);
      const Vector p = *prox.prox(z, lambda);
      // <p - z, x - p> >= lambda (g(p) - g(x)).
      const double slack = (p - z).dot(x - p) -
                           lambda * (ProxKindValue(kind, p) -
                                     ProxKindValue(kind, x));
      worst_slack = std::min(worst_slack, slack);
    }
  }
  return {worst_grid <= 1e-5 && worst_slack >= -1e-9,
          absl::StrFormat("max |prox_l1 - grid| = %.3g over 1000 triples; "
                          "min variational slack = %.3g over 4 kinds x 1000",
                          worst_grid, worst_slack)};
}

// ---------------------------------------------------------------------------
// 2. Gradient correctness
// ---------------------------------------------------------------------------

Outcome GradientCheck() {
  const LogisticDataset data = *GenerateLogisticDataset(50, 80, 11);
  // Smooth part f(x) = sum_i log(1 + exp(K_i x)), summed independently.
  auto f = [&data](const Vector& x) {
    const Vector kx = data.k * x;
    double sum = 0.0;
    for (int i = 0; i < kx.size(); ++i) sum += std::log1p(std::exp(kx(i)));
    return sum;
  };
  double worst = 0.0;
  for (int point = 0; point < 5; ++point) {
    const Vector x = RandomPoint(80, 100 + point);
    const Vector grad = LogisticGradient(data, x);
    Vector fd(80);
    const double h = 1e-6;
    for (int j = 0; j < 80; ++j) {
      Vector xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      fd(j) = (f(xp) - f(xm)) / (2 * h);
    }
    worst = std::max(worst, (grad - fd).norm() / fd.norm());
  }
  return {worst <= 1e-5,
          absl::StrFormat("max relative error %.3g at 5 points, (N, m) = (50, 80)",
                          worst)};
}

// ---------------------------------------------------------------------------
// 3. Stepsize floor
// ---------------------------------------------------------------------------

Outcome StepsizeFloor() {
  std::string detail;
  bool pass = true;
  for (double modulus : {1.0, 0.1}) {
    const AffineCase c = MakeAffineCase(modulus);
    Alg2Config alg;  // lambda0 = 1, mu = 0.45 phi
    SolverConfig config;
    config.tol = 0.0;
    config.max_iter = 10000;
    const RunResult run =
        *RunGoldenRatioAdaptive(c.problem, alg, c.x1, c.x1, c.x1, config);
    const double floor = std::min(1.0, alg.mu / c.lipschitz);
    double min_step = kInf;
    bool monotone = true;
    for (size_t i = 1; i < run.trace.size(); ++i) {
      min_step = std::min(min_step, run.trace[i].stepsize);
      monotone = monotone && run.trace[i].stepsize <= run.trace[i - 1].stepsize;
    }
    const bool ok = run.trace.size() == 10001 && monotone &&
                    min_step >= floor - 1e-12;
    pass = pass && ok;
    absl::StrAppendFormat(&detail,
                          "%smodulus %g: min lambda %.6g >= floor %.6g, "
                          "non-increasing=%s",
                          detail.empty() ? "" : "; ", modulus, min_step, floor,
                          monotone ? "yes" : "no");
  }
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 4. Diminishing stepsizes: convergence and power rate
// ---------------------------------------------------------------------------

Outcome DiminishingRate() {
  const AffineCase c = MakeAffineCase(0.1);
  SolverConfig config;
  config.tol = 0.0;
  config.max_iter = 10000;
  const RunResult run = *RunGoldenRatioDiminishing(
      c.problem, PowerSchedule{1.0, 0.5}, c.x1, c.x1, config);
  const double final_dist = *run.trace.back().dist_to_solution_sq;
  const absl::StatusOr<RateFit> fit = FitPowerRate(
      run.trace, TraceField::kDistToSolutionSq, IterWindow{100, 10000});
  if (!fit.ok()) return {false, std::string(fit.status().message())};
  return {final_dist < 1e-6 && fit->slope <= -0.4,
          absl::StrFormat("||x_n - x*||^2 = %.3g at n = 10000; log-log slope "
                          "over [100, 10000] = %.3f (R^2 %.3f)",
                          final_dist, fit->slope, fit->r_squared)};
}

// ---------------------------------------------------------------------------
// 5. Linear rate
// ---------------------------------------------------------------------------

Outcome LinearRate() {
  const AffineCase c = MakeAffineCase(0.1);
  Alg2Config alg;
  alg.rho = 0.4;
  alg.mu = 0.9 * 0.4 * GoldenRatio() / 1.4;
  alg.enforce_rate_regime = true;
  SolverConfig config;
  config.tol = 1e-10;
  config.max_iter = 50000;
  const RunResult run =
      *RunGoldenRatioAdaptive(c.problem, alg, c.x1, c.x1, c.x1, config);
  const int64_t last = run.trace.back().iter;
  const double final_dist = *run.trace.back().dist_to_solution_sq;
  const absl::StatusOr<GeometricFit> fit =
      FitGeometricRate(run.trace, TraceField::kDistToSolutionSq,
                       IterWindow{std::max<int64_t>(0, last - 499), last});
  if (!fit.ok()) return {false, std::string(fit.status().message())};
  return {fit->ratio < 1.0 && final_dist < 1e-10 && last <= 50000,
          absl::StrFormat("theta_hat = %.4f over the last 500 iterations; "
                          "||x_n - x*||^2 = %.3g at n = %d",
                          fit->ratio, final_dist, last)};
}

// ---------------------------------------------------------------------------
// 6. Lyapunov monotonicity
// ---------------------------------------------------------------------------

Outcome LyapunovMonotone() {
  const AffineCase c = MakeAffineCase(0.1);
  const double phi = GoldenRatio();
  Alg2Config alg;
  alg.lambda0 = alg.mu / c.lipschitz;
  const Vector& solution = c.spec->known_solution;
  std::vector<double> a_bar;
  Vector previous = c.x1;  // x_0 = x_1
  SolverConfig config;
  config.tol = 0.0;
  config.max_iter = 5000;
  config.on_step = [&](const IterateState& s) {
    // After a step: s.x_bar = x_bar_n, s.x_prev = x_n; `previous` = x_{n-1}.
    a_bar.push_back(phi / (phi - 1.0) * (s.x_bar - solution).squaredNorm() +
                    alg.mu * (s.x_prev - previous).squaredNorm());
    previous = s.x_prev;
  };
  if (!RunGoldenRatioAdaptive(c.problem, alg, c.x1, c.x1, c.x1, config).ok()) {
    return {false, "run failed"};
  }
  double worst = -kInf;
  for (size_t i = 2; i < a_bar.size(); ++i) {
    worst = std::max(worst, a_bar[i] - a_bar[i - 1]);
  }
  return {worst <= 1e-10,
          absl::StrFormat("max a_{n+1} - a_n = %.3g over n = 2..%d "
                          "(a_2 = %.4g, a_end = %.3g)",
                          worst, a_bar.size(), a_bar[1], a_bar.back())};
}

// ---------------------------------------------------------------------------
// 7-9. Benchmark configs
// ---------------------------------------------------------------------------

struct BenchmarkDirs {
  fs::path first;
  fs::path second;
};

Outcome LogisticExample(const BenchmarkDirs& dirs) {
  const ExperimentConfig config = *LoadConfigFile(ConfigPath("logistic.yaml"));
  const absl::StatusOr<ExperimentSummary> summary =
      RunExperiment(config, RunOptions{1, dirs.first.string()});
  if (!summary.ok()) return {false, std::string(summary.status().message())};
  bool pass = summary->cells.size() == 3 && summary->reference_objective;
  std::string detail = absl::StrFormat(
      "J* = %.10g;", summary->reference_objective.value_or(kInf));
  for (const CellResult& cell : summary->cells) {
    const bool ok = cell.status == "converged" &&
                    cell.final_natural_residual.value_or(kInf) <= 1e-3 &&
                    cell.relative_gap.value_or(kInf) <= 1e-2;
    pass = pass && ok;
    absl::StrAppendFormat(&detail, " %s: %d it, residual %.3g, gap %.2g;",
                          cell.label, cell.iterations,
                          cell.final_natural_residual.value_or(kInf),
                          cell.relative_gap.value_or(kInf));
  }
  return {pass, detail};
}

Outcome SunExample(const BenchmarkDirs& dirs) {
  const ExperimentConfig config = *LoadConfigFile(ConfigPath("sun.yaml"));
  const absl::StatusOr<ExperimentSummary> summary =
      RunExperiment(config, RunOptions{1, dirs.first.string()});
  if (!summary.ok()) return {false, std::string(summary.status().message())};
  bool pass = summary->cells.size() == 2;
  std::string detail;
  for (const CellResult& cell : summary->cells) {
    const bool ok = cell.status == "converged" &&
                    cell.final_d_n.value_or(kInf) < 1e-6 &&
                    cell.iterations <= 100000;
    pass = pass && ok;
    absl::StrAppendFormat(&detail, "%s: %d it, D_n %.3g; ", cell.label,
                          cell.iterations, cell.final_d_n.value_or(kInf));
  }
  // Feasibility of every iterate, observed step by step.
  const VIProblem problem = *BuildProblem(config.problem);
  const Vector x1 = RandomPoint(problem.dim, config.seeds.front());
  SolverConfig solver;
  solver.tol = config.tol;
  solver.max_iter = config.max_iter;
  int64_t infeasible = 0, steps = 0;
  solver.on_step = [&](const IterateState& s) {
    ++steps;
    if ((s.x_curr.array() < 0.0).any()) ++infeasible;
  };
  for (const AlgorithmSpec& alg : config.algorithms) {
    if (const auto* a2 = std::get_if<Alg2Config>(&alg.params)) {
      pass = pass && RunGoldenRatioAdaptive(problem, *a2, x1, x1, x1, solver).ok();
    } else if (const auto* eg = std::get_if<EgraalConfig>(&alg.params)) {
      pass = pass && RunExplicitGoldenRatio(problem, *eg, x1, x1, solver).ok();
    }
  }
  pass = pass && infeasible == 0 && steps > 0;
  absl::StrAppendFormat(&detail, "%d of %d iterates outside R^m_+", infeasible,
                        steps);
  return {pass, detail};
}

Outcome Determinism(const BenchmarkDirs& dirs) {
  // The first pass of logistic/sun was written by criteria 7 and 8;
  // the affine grid is run twice here.
  const ExperimentConfig affine = *LoadConfigFile(ConfigPath("affine.yaml"));
  if (!RunExperiment(affine, RunOptions{1, dirs.first.string()}).ok()) {
    return {false, "first affine run failed"};
  }
  for (const char* name : {"logistic.yaml", "sun.yaml", "affine.yaml"}) {
    const ExperimentConfig config = *LoadConfigFile(ConfigPath(name));
    if (!RunExperiment(config, RunOptions{1, dirs.second.string()}).ok()) {
      return {false, absl::StrFormat("second run of %s failed", name)};
    }
  }
  int compared = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(dirs.first)) {
    const fs::path name = entry.path().filename();
    if (name == "summary.csv" || entry.path().extension() != ".csv") continue;
    ++compared;
    const fs::path other = dirs.second / name;
    if (!fs::exists(other) || StripTiming(ReadFile(entry.path())) !=
                                  StripTiming(ReadFile(other))) {
      ++differing;
    }
  }
  return {compared > 0 && differing == 0,
          absl::StrFormat("%d trace files compared, %d differ", compared,
                          differing)};
}

// ---------------------------------------------------------------------------
// 10. Oracle-cost audit
// ---------------------------------------------------------------------------

Outcome OracleCost() {
  const AffineCase c = MakeAffineCase(0.1);
  const int steps = 1000;
  std::string detail;
  bool pass = true;
  for (const char* name : {"alg1", "alg2", "egraal"}) {
    auto counters = std::make_shared<OracleCounters>();
    const VIProblem problem = Instrument(c.problem, counters);
    SolverConfig config;
    config.tol = 0.0;
    config.max_iter = steps;
    config.record_every = steps + 1;  // only the first and last rows
    int64_t bad = 0, observed = 0;
    int64_t last_f = -1, last_p = -1;
    config.on_step = [&](const IterateState&) {
      const int64_t f = counters->operator_calls.load();
      const int64_t p = counters->prox_calls.load();
      if (last_f >= 0) {
        ++observed;
        if (f - last_f != 1 || p - last_p != 1) ++bad;
      }
      last_f = f;
      last_p = p;
    };
    absl::Status status;
    if (std::string(name) == "alg1") {
      status = RunGoldenRatioDiminishing(problem, PowerSchedule{}, c.x1, c.x1,
                                         config)
                   .status();
    } else if (std::string(name) == "alg2") {
      status =
          RunGoldenRatioAdaptive(problem, Alg2Config{}, c.x1, c.x1, c.x1, config)
              .status();
    } else {
      status =
          RunExplicitGoldenRatio(problem, EgraalConfig{}, c.x1, c.x1, config)
              .status();
    }
    const bool ok = status.ok() && bad == 0 && observed == steps - 1;
    pass = pass && ok;
    absl::StrAppendFormat(&detail,
                          "%s%s: %d/%d steps with (1 F, 1 prox), totals F=%d "
                          "prox=%d",
                          detail.empty() ? "" : "; ", name, observed - bad,
                          observed, counters->operator_calls.load(),
                          counters->prox_calls.load());
  }
  return {pass, detail};
}

int Main(int argc, char** argv) {
  const fs::path root =
      argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "grvi_acceptance";
  BenchmarkDirs dirs{root / "first", root / "second"};
  fs::remove_all(root);
  fs::create_directories(dirs.first);
  fs::create_directories(dirs.second);

  struct Criterion {
    const char* name;
    double budget_s;  // 0: no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"prox oracle equivalence", 5, ProxEquivalence},
      {"logistic gradient vs finite differences", 5, GradientCheck},
      {"adaptive stepsize floor", 10, StepsizeFloor},
      {"diminishing stepsizes: convergence and rate", 30, DiminishingRate},
      {"adaptive stepsizes: linear rate", 30, LinearRate},
      {"Lyapunov monotonicity", 10, LyapunovMonotone},
      {"sparse logistic example", 120, [&] { return LogisticExample(dirs); }},
      {"Sun complementarity example", 120, [&] { return SunExample(dirs); }},
      {"determinism of benchmark traces", 0, [&] { return Determinism(dirs); }},
      {"oracle-cost audit", 0, OracleCost},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome = criteria[i].run();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::string timing = absl::StrFormat("%.2f s", seconds);
    if (criteria[i].budget_s > 0) {
      absl::StrAppendFormat(&timing, " / budget %.0f s", criteria[i].budget_s);
      if (seconds >= criteria[i].budget_s) {
        outcome.pass = false;
        timing += " EXCEEDED";
      }
    }
    if (!outcome.pass) ++failures;
    std::printf("%s [%zu] %s: %s (%s)\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, outcome.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace grvi

int main(int argc, char** argv) { return grvi::Main(argc, argv); }
