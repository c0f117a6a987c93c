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

// Shared vocabulary for all solvers: the composite variational inequality
//
//   find x* such that <F(x*), x - x*> + g(x) - g(x*) >= 0 for all x,
//
// described by an operator oracle F and a prox-capable function g, plus the
// per-run state, trace rows and termination logic used by every algorithm.

#ifndef GRVI_CORE_H_
#define GRVI_CORE_H_

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "Eigen/Core"
#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace grvi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// (1 + sqrt(5)) / 2 rounded to the nearest double.
constexpr double kGoldenRatio = 1.6180339887498948482;

double GoldenRatio();

// Returns ((phi - 1) * x_n + x_bar_prev) / phi, the golden-ratio memory step.
// The weights (phi - 1) / phi and 1 / phi sum to one, so the result lies on the
// segment [x_bar_prev, x_n].
absl::StatusOr<Vector> GoldenRatioAverage(const Vector& x_n,
                                          const Vector& x_bar_prev);

// Same convex combination for an arbitrary averaging parameter phi > 1 (the
// explicit golden ratio baseline allows phi in (1, golden ratio]).
Vector GoldenRatioAverage(const Vector& x_n, const Vector& x_bar_prev,
                          double phi);

// Operator F of the inequality. `eval` must be deterministic, preserve
// dimension and be safe to call concurrently.
struct OperatorOracle {
  std::function<absl::StatusOr<Vector>(const Vector&)> eval;
  std::optional<double> lipschitz;
  std::optional<double> strong_pseudo_modulus;
};

// prox(z, lambda) = argmin_y { lambda * g(y) + 0.5 * ||y - z||^2 }.
// `value` may be empty; it returns +infinity outside dom g.
struct ProxFunction {
  std::function<absl::StatusOr<Vector>(const Vector&, double)> prox;
  std::function<double(const Vector&)> value;
};

struct VIProblem {
  std::string name;
  int dim = 0;
  OperatorOracle op;
  ProxFunction g;
  std::optional<Vector> known_solution;
  // J = f + g when the inequality comes from minimizing J with F = grad f.
  std::function<double(const Vector&)> objective;

  bool has_objective() const { return static_cast<bool>(objective); }

  // Oracle calls with dimension checks on input and output.
  absl::StatusOr<Vector> Operator(const Vector& x) const;
  absl::StatusOr<Vector> Prox(const Vector& z, double lambda) const;

  absl::Status Validate() const;
};

// Thread-safe call counters attached by Instrument().
struct OracleCounters {
  std::atomic<int64_t> operator_calls{0};
  std::atomic<int64_t> prox_calls{0};
};

// Returns a copy of `problem` whose oracles bump `counters` on every call.
VIProblem Instrument(const VIProblem& problem,
                     std::shared_ptr<OracleCounters> counters);

// ||x - prox_{s g}(x - s F(x))||, zero exactly at solutions.
absl::StatusOr<double> NaturalResidual(const VIProblem& problem,
                                       const Vector& x, double scale = 1.0);
// Variant reusing an already computed F(x); costs one prox call.
absl::StatusOr<double> NaturalResidual(const VIProblem& problem,
                                       const Vector& x, const Vector& fx,
                                       double scale);

// Full mutable state of a golden-ratio type iteration at the start of
// iteration n: x_curr = x_n, x_prev = x_{n-1}, x_bar = x_bar_{n-1} and the
// cached operator values at x_n and x_{n-1}. lambda_curr is the stepsize of
// the most recent step and lambda_prev the one before it.
struct IterateState {
  Vector x_curr;
  Vector x_prev;
  Vector x_bar;
  Vector f_curr;
  Vector f_prev;
  double lambda_curr = 1.0;
  double lambda_prev = 1.0;
  int64_t iter = 1;
};

struct TraceRecord {
  int64_t iter = 0;
  double natural_residual = 0.0;
  // ||x_{n+1} - x_bar_n||^2 + ||x_bar_n - x_n||^2 of the step that produced
  // the current iterate; 0 on the initial row.
  double d_n = 0.0;
  std::optional<double> objective;
  double stepsize = 0.0;
  std::optional<double> dist_to_solution_sq;
  double elapsed_ms = 0.0;
  // Not written to trace files; feeds the divergence guard.
  double iterate_norm = 0.0;
};

using StepObserver = std::function<void(const IterateState&)>;

struct SolverConfig {
  // Converged once the natural residual is <= tol. tol = 0 disables the test,
  // and the residual is then only evaluated on recorded rows.
  double tol = 1e-3;
  int64_t max_iter = 100000;
  int64_t record_every = 1;
  double divergence_bound = 1e12;
  double residual_scale = 1.0;
  // Called after every step of the golden-ratio family with the new state.
  StepObserver on_step;
};

enum class Termination { kContinue, kConverged, kMaxIter, kDiverged };

std::string_view TerminationName(Termination t);

// Diverged takes precedence over converged, which takes precedence over the
// iteration cap.
Termination CheckTermination(const TraceRecord& record,
                             const SolverConfig& config);

struct RunResult {
  std::vector<TraceRecord> trace;
  Termination status = Termination::kContinue;
  Vector x_final;
  int64_t iterations = 0;
};

}  // namespace grvi

#endif  // GRVI_CORE_H_
