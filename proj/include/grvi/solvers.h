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

// Iterative solvers for composite variational inequalities.
//
// The golden-ratio family shares one step,
//
//   x_bar_n = ((phi - 1) x_n + x_bar_{n-1}) / phi,
//   x_{n+1} = prox_{lambda_n g}(x_bar_n - lambda_n F(x_n)),
//
// and differs only in how lambda_n is chosen:
//   * RunGoldenRatioDiminishing: a prescribed non-increasing, non-summable
//     sequence tending to zero (for example lambda_n = c / n^p, 0 < p <= 1).
//   * RunGoldenRatioAdaptive: lambda_n = min(lambda_{n-1},
//     mu ||x_n - x_{n-1}|| / ||F(x_n) - F(x_{n-1})||), with 0/0 = +inf.
//   * RunExplicitGoldenRatio: the explicit golden ratio algorithm (EGRAAL),
//     whose stepsize may also grow, capped by lambda_max.
// RunFista is the accelerated proximal gradient baseline for problems that
// come from minimizing f + g with a known Lipschitz constant of grad f.
//
// Every solver costs one F evaluation and one prox evaluation per step of the
// golden-ratio family; monitoring adds one prox call per evaluated natural
// residual. Trace row k describes the iterate after k steps.

#ifndef GRVI_SOLVERS_H_
#define GRVI_SOLVERS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "grvi/core.h"

namespace grvi {

// lambda_n = c / n^p.
struct PowerSchedule {
  double c = 1.0;
  double p = 0.5;
};

// Arbitrary sequence n -> lambda_n (n >= 1). Positivity and non-increase are
// checked while running.
struct CustomSchedule {
  std::function<double(int64_t)> lambda;
};

using StepsizeSchedule = std::variant<PowerSchedule, CustomSchedule>;

absl::Status ValidateSchedule(const StepsizeSchedule& schedule);
double ScheduleValue(const StepsizeSchedule& schedule, int64_t n);

struct Alg2Config {
  double lambda0 = 1.0;
  double mu = 0.45 * kGoldenRatio;
  std::optional<double> rho;
  // Requires mu < rho / (1 + rho) * phi with rho in (0, 1/sqrt(5)), the
  // regime with a linear rate under strong pseudomonotonicity.
  bool enforce_rate_regime = false;
};

absl::Status ValidateAlg2Config(const Alg2Config& config);

struct EgraalConfig {
  double lambda0 = 1.0;
  double lambda_max = 1.0;
  double phi = kGoldenRatio;  // in (1, golden ratio]
};

absl::Status ValidateEgraalConfig(const EgraalConfig& config);

// min(lambda_prev, mu ||x_n - x_prev|| / ||fx_n - fx_prev||) where a zero
// denominator makes the ratio +inf. Iterates closer than
// 8 * eps * max(||x_n||, ||x_prev||) count as coincident (0/0) as well.
double AdaptiveStepsize(double lambda_prev, double mu, const Vector& x_n,
                        const Vector& x_prev, const Vector& fx_n,
                        const Vector& fx_prev);

// One golden-ratio step from the state at iteration n. Returns the state at
// iteration n + 1: x_bar = x_bar_n, x_prev = x_n, x_curr = x_{n+1} and
// f_curr = F(x_{n+1}). Exactly one F and one prox evaluation.
absl::StatusOr<IterateState> GoldenStep(const VIProblem& problem,
                                        const IterateState& state,
                                        double lambda,
                                        double phi = kGoldenRatio);

// ||x_{n+1} - x_bar_n||^2 + ||x_bar_n - x_n||^2 for a state returned by
// GoldenStep.
double StepResidual(const IterateState& state);

absl::StatusOr<RunResult> RunGoldenRatioDiminishing(
    const VIProblem& problem, const StepsizeSchedule& schedule,
    const Vector& x1, const Vector& x_bar0, const SolverConfig& config);

absl::StatusOr<RunResult> RunGoldenRatioAdaptive(const VIProblem& problem,
                                                 const Alg2Config& alg,
                                                 const Vector& x0,
                                                 const Vector& x1,
                                                 const Vector& x_bar0,
                                                 const SolverConfig& config);

// Starts from x_bar_0 = x1, theta_0 = 1.
absl::StatusOr<RunResult> RunExplicitGoldenRatio(const VIProblem& problem,
                                                 const EgraalConfig& alg,
                                                 const Vector& x0,
                                                 const Vector& x1,
                                                 const SolverConfig& config);

// t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2.
double FistaMomentum(double t);

// Constant stepsize 1 / lipschitz. The d_n column holds
// ||x_k - y_{k-1}||^2 + ||y_{k-1} - x_{k-1}||^2 with the extrapolated point y
// in place of x_bar.
absl::StatusOr<RunResult> RunFista(const VIProblem& problem, double lipschitz,
                                   const Vector& x0,
                                   const SolverConfig& config);

}  // namespace grvi

#endif  // GRVI_SOLVERS_H_
