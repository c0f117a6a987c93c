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

#include "grvi/solvers.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <utility>
#include <variant>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace grvi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCoincidenceUlps = 8.0;

absl::Status CheckStart(const VIProblem& problem, const Vector& x,
                        const char* what) {
  if (x.size() != problem.dim) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s has dimension %d, problem %s has dimension %d",
                        what, x.size(), problem.name, problem.dim));
  }
  if (!x.allFinite()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s has non-finite entries", what));
  }
  return absl::OkStatus();
}

absl::Status CheckConfig(const SolverConfig& config) {
  if (!(config.tol >= 0.0)) {
    return absl::InvalidArgumentError("tolerance must be nonnegative");
  }
  if (config.max_iter < 0) {
    return absl::InvalidArgumentError("max_iter must be nonnegative");
  }
  if (config.record_every < 1) {
    return absl::InvalidArgumentError("record_every must be at least 1");
  }
  if (!(config.divergence_bound > 0.0)) {
    return absl::InvalidArgumentError("divergence bound must be positive");
  }
  if (!(config.residual_scale > 0.0)) {
    return absl::InvalidArgumentError("residual scale must be positive");
  }
  return absl::OkStatus();
}

// Builds trace rows, evaluates the natural residual when a row is recorded or
// the tolerance test needs it, and decides termination.
class RunMonitor {
 public:
  RunMonitor(const VIProblem& problem, const SolverConfig& config)
      : problem_(problem),
        config_(config),
        start_(std::chrono::steady_clock::now()) {}

  // `fx` may be null, in which case F(x) is evaluated when needed.
  absl::StatusOr<Termination> Observe(int64_t iter, const Vector& x,
                                      const Vector* fx, double d_n,
                                      double stepsize) {
    TraceRecord record;
    record.iter = iter;
    record.d_n = d_n;
    record.stepsize = stepsize;
    record.iterate_norm = x.norm();

    const bool due = iter % config_.record_every == 0;
    const bool bad_norm = !std::isfinite(record.iterate_norm) ||
                          record.iterate_norm > config_.divergence_bound;
    const bool need_residual =
        due || config_.tol > 0.0 || iter >= config_.max_iter || bad_norm;
    if (need_residual) {
      absl::StatusOr<double> residual = Residual(x, fx);
      if (!residual.ok()) return residual.status();
      record.natural_residual = *residual;
    }
    const Termination t = CheckTermination(record, config_);
    if (due || t != Termination::kContinue) {
      if (problem_.has_objective()) record.objective = problem_.objective(x);
      if (problem_.known_solution.has_value()) {
        record.dist_to_solution_sq =
            (x - *problem_.known_solution).squaredNorm();
      }
      record.elapsed_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start_)
                              .count();
      result_.trace.push_back(record);
    }
    return t;
  }

  RunResult Finish(Termination status, Vector x_final, int64_t iterations) {
    result_.status = status;
    result_.x_final = std::move(x_final);
    result_.iterations = iterations;
    return std::move(result_);
  }

 private:
  absl::StatusOr<double> Residual(const Vector& x, const Vector* fx) {
    if (fx != nullptr) {
      return NaturalResidual(problem_, x, *fx, config_.residual_scale);
    }
    return NaturalResidual(problem_, x, config_.residual_scale);
  }

  const VIProblem& problem_;
  const SolverConfig& config_;
  std::chrono::steady_clock::time_point start_;
  RunResult result_;
};

// Shared driver for the golden-ratio family. `next_lambda` maps the current
// state and step number n to lambda_n; `after_step` updates per-algorithm
// state once the step is taken.
template <class NextLambda, class AfterStep>
absl::StatusOr<RunResult> RunGoldenFamily(const VIProblem& problem,
                                          IterateState state, double phi,
                                          const SolverConfig& config,
                                          NextLambda next_lambda,
                                          AfterStep after_step) {
  RunMonitor monitor(problem, config);
  absl::StatusOr<Termination> t =
      monitor.Observe(0, state.x_curr, &state.f_curr, 0.0, state.lambda_curr);
  if (!t.ok()) return t.status();
  int64_t steps = 0;
  while (*t == Termination::kContinue) {
    absl::StatusOr<double> lambda = next_lambda(state, steps + 1);
    if (!lambda.ok()) return lambda.status();
    absl::StatusOr<IterateState> next = GoldenStep(problem, state, *lambda, phi);
    if (!next.ok()) return next.status();
    state = *std::move(next);
    ++steps;
    after_step(state);
    if (config.on_step) config.on_step(state);
    t = monitor.Observe(steps, state.x_curr, &state.f_curr,
                        StepResidual(state), *lambda);
    if (!t.ok()) return t.status();
  }
  return monitor.Finish(*t, state.x_curr, steps);
}

absl::StatusOr<IterateState> InitialState(const VIProblem& problem,
                                          const Vector& x0, const Vector& x1,
                                          const Vector& x_bar0,
                                          double lambda0) {
  IterateState state;
  state.x_curr = x1;
  state.x_prev = x0;
  state.x_bar = x_bar0;
  absl::StatusOr<Vector> f1 = problem.Operator(x1);
  if (!f1.ok()) return f1.status();
  state.f_curr = *std::move(f1);
  if (x0 == x1) {
    state.f_prev = state.f_curr;
  } else {
    absl::StatusOr<Vector> f0 = problem.Operator(x0);
    if (!f0.ok()) return f0.status();
    state.f_prev = *std::move(f0);
  }
  state.lambda_curr = lambda0;
  state.lambda_prev = lambda0;
  state.iter = 1;
  return state;
}

}  // namespace

absl::Status ValidateSchedule(const StepsizeSchedule& schedule) {
  if (const auto* power = std::get_if<PowerSchedule>(&schedule)) {
    if (!(power->c > 0.0) || !std::isfinite(power->c)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "power schedule scale must be positive, got %g", power->c));
    }
    if (!(power->p > 0.0 && power->p <= 1.0)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "power schedule exponent must lie in (0, 1], got %g", power->p));
    }
    return absl::OkStatus();
  }
  if (!std::get<CustomSchedule>(schedule).lambda) {
    return absl::InvalidArgumentError("custom schedule has no sequence");
  }
  return absl::OkStatus();
}

double ScheduleValue(const StepsizeSchedule& schedule, int64_t n) {
  if (const auto* power = std::get_if<PowerSchedule>(&schedule)) {
    return power->c / std::pow(static_cast<double>(n), power->p);
  }
  return std::get<CustomSchedule>(schedule).lambda(n);
}

absl::Status ValidateAlg2Config(const Alg2Config& config) {
  if (!(config.lambda0 > 0.0) || !std::isfinite(config.lambda0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "lambda0 must be positive and finite, got %g", config.lambda0));
  }
  if (!(config.mu > 0.0 && config.mu < kGoldenRatio / 2.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "mu must lie in (0, phi/2) = (0, %.17g), got %g", kGoldenRatio / 2.0,
        config.mu));
  }
  if (config.rho.has_value()) {
    const double rho = *config.rho;
    if (!(rho > 0.0 && rho < 1.0 / std::sqrt(5.0))) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "rho must lie in (0, 1/sqrt(5)), got %g", rho));
    }
  }
  if (config.enforce_rate_regime) {
    if (!config.rho.has_value()) {
      return absl::InvalidArgumentError(
          "the linear-rate regime check needs rho");
    }
    const double bound = *config.rho / (1.0 + *config.rho) * kGoldenRatio;
    if (!(config.mu < bound)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "mu = %g is outside the linear-rate regime mu < rho/(1+rho)*phi = "
          "%.17g",
          config.mu, bound));
    }
  }
  return absl::OkStatus();
}

absl::Status ValidateEgraalConfig(const EgraalConfig& config) {
  if (!(config.lambda0 > 0.0) || !std::isfinite(config.lambda0)) {
    return absl::InvalidArgumentError("EGRAAL lambda0 must be positive");
  }
  if (!(config.lambda_max > 0.0)) {
    return absl::InvalidArgumentError("EGRAAL lambda_max must be positive");
  }
  if (!(config.phi > 1.0 && config.phi <= kGoldenRatio)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "EGRAAL phi must lie in (1, golden ratio], got %g", config.phi));
  }
  return absl::OkStatus();
}

double AdaptiveStepsize(double lambda_prev, double mu, const Vector& x_n,
                        const Vector& x_prev, const Vector& fx_n,
                        const Vector& fx_prev) {
  const double df = (fx_n - fx_prev).norm();
  if (df == 0.0) return lambda_prev;
  // Iterates that agree to working precision are the 0/0 case: their operator
  // difference is rounding noise and says nothing about the local Lipschitz
  // constant.
  const double dx = (x_n - x_prev).norm();
  if (dx <= kCoincidenceUlps * std::numeric_limits<double>::epsilon() *
                std::max(x_n.norm(), x_prev.norm())) {
    return lambda_prev;
  }
  return std::min(lambda_prev, mu * dx / df);
}

absl::StatusOr<IterateState> GoldenStep(const VIProblem& problem,
                                        const IterateState& state,
                                        double lambda, double phi) {
  if (state.x_curr.size() != problem.dim ||
      state.x_bar.size() != problem.dim ||
      state.f_curr.size() != problem.dim) {
    return absl::InvalidArgumentError("GoldenStep: state dimension mismatch");
  }
  IterateState next;
  next.x_bar = GoldenRatioAverage(state.x_curr, state.x_bar, phi);
  absl::StatusOr<Vector> x_next =
      problem.Prox(next.x_bar - lambda * state.f_curr, lambda);
  if (!x_next.ok()) return x_next.status();
  absl::StatusOr<Vector> f_next = problem.Operator(*x_next);
  if (!f_next.ok()) return f_next.status();
  next.x_prev = state.x_curr;
  next.f_prev = state.f_curr;
  next.x_curr = *std::move(x_next);
  next.f_curr = *std::move(f_next);
  next.lambda_prev = state.lambda_curr;
  next.lambda_curr = lambda;
  next.iter = state.iter + 1;
  return next;
}

double StepResidual(const IterateState& state) {
  return (state.x_curr - state.x_bar).squaredNorm() +
         (state.x_bar - state.x_prev).squaredNorm();
}

absl::StatusOr<RunResult> RunGoldenRatioDiminishing(
    const VIProblem& problem, const StepsizeSchedule& schedule,
    const Vector& x1, const Vector& x_bar0, const SolverConfig& config) {
  if (absl::Status s = problem.Validate(); !s.ok()) return s;
  if (absl::Status s = CheckConfig(config); !s.ok()) return s;
  if (absl::Status s = ValidateSchedule(schedule); !s.ok()) return s;
  if (absl::Status s = CheckStart(problem, x1, "x1"); !s.ok()) return s;
  if (absl::Status s = CheckStart(problem, x_bar0, "x_bar0"); !s.ok()) return s;

  const double lambda1 = ScheduleValue(schedule, 1);
  absl::StatusOr<IterateState> state =
      InitialState(problem, x1, x1, x_bar0, lambda1);
  if (!state.ok()) return state.status();
  double last = kInf;
  return RunGoldenFamily(
      problem, *std::move(state), kGoldenRatio, config,
      [&schedule, &last](const IterateState&,
                         int64_t n) -> absl::StatusOr<double> {
        const double lambda = ScheduleValue(schedule, n);
        if (!(lambda > 0.0) || !std::isfinite(lambda)) {
          return absl::InvalidArgumentError(absl::StrFormat(
              "stepsize schedule emitted lambda_%d = %g", n, lambda));
        }
        if (lambda > last) {
          return absl::InvalidArgumentError(absl::StrFormat(
              "stepsize schedule increased at n = %d: %.17g > %.17g", n,
              lambda, last));
        }
        last = lambda;
        return lambda;
      },
      [](const IterateState&) {});
}

absl::StatusOr<RunResult> RunGoldenRatioAdaptive(const VIProblem& problem,
                                                 const Alg2Config& alg,
                                                 const Vector& x0,
                                                 const Vector& x1,
                                                 const Vector& x_bar0,
                                                 const SolverConfig& config) {
  if (absl::Status s = problem.Validate(); !s.ok()) return s;
  if (absl::Status s = CheckConfig(config); !s.ok()) return s;
  if (absl::Status s = ValidateAlg2Config(alg); !s.ok()) return s;
  if (absl::Status s = CheckStart(problem, x0, "x0"); !s.ok()) return s;
  if (absl::Status s = CheckStart(problem, x1, "x1"); !s.ok()) return s;
  if (absl::Status s = CheckStart(problem, x_bar0, "x_bar0"); !s.ok()) return s;

  absl::StatusOr<IterateState> state =
      InitialState(problem, x0, x1, x_bar0, alg.lambda0);
  if (!state.ok()) return state.status();
  const double mu = alg.mu;
  return RunGoldenFamily(
      problem, *std::move(state), kGoldenRatio, config,
      [mu](const IterateState& s, int64_t) -> absl::StatusOr<double> {
        return AdaptiveStepsize(s.lambda_curr, mu, s.x_curr, s.x_prev,
                                s.f_curr, s.f_prev);
      },
      [](const IterateState&) {});
}

absl::StatusOr<RunResult> RunExplicitGoldenRatio(const VIProblem& problem,
                                                 const EgraalConfig& alg,
                                                 const Vector& x0,
                                                 const Vector& x1,
                                                 const SolverConfig& config) {
  if (absl::Status s = problem.Validate(); !s.ok()) return s;
  if (absl::Status s = CheckConfig(config); !s.ok()) return s;
  if (absl::Status s = ValidateEgraalConfig(alg); !s.ok()) return s;
  if (absl::Status s = CheckStart(problem, x0, "x0"); !s.ok()) return s;
  if (absl::Status s = CheckStart(problem, x1, "x1"); !s.ok()) return s;

  absl::StatusOr<IterateState> state =
      InitialState(problem, x0, x1, x1, alg.lambda0);
  if (!state.ok()) return state.status();
  const double phi = alg.phi;
  const double rho = 1.0 / phi + 1.0 / (phi * phi);
  const double lambda_max = alg.lambda_max;
  double theta = 1.0;
  return RunGoldenFamily(
      problem, *std::move(state), phi, config,
      [&](const IterateState& s, int64_t) -> absl::StatusOr<double> {
        const double dx2 = (s.x_curr - s.x_prev).squaredNorm();
        const double df2 = (s.f_curr - s.f_prev).squaredNorm();
        const double ratio = df2 == 0.0 ? kInf : dx2 / df2;
        const double local =
            phi * theta / (4.0 * s.lambda_curr) * ratio;
        return std::min({rho * s.lambda_curr, local, lambda_max});
      },
      [&](const IterateState& s) {
        theta = phi * s.lambda_curr / s.lambda_prev;
      });
}

double FistaMomentum(double t) {
  return (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
}

absl::StatusOr<RunResult> RunFista(const VIProblem& problem, double lipschitz,
                                   const Vector& x0,
                                   const SolverConfig& config) {
  if (absl::Status s = problem.Validate(); !s.ok()) return s;
  if (absl::Status s = CheckConfig(config); !s.ok()) return s;
  if (!problem.has_objective()) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "FISTA needs a minimization problem; %s has no objective",
        problem.name));
  }
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "FISTA needs a positive Lipschitz constant, got %g", lipschitz));
  }
  if (absl::Status s = CheckStart(problem, x0, "x0"); !s.ok()) return s;

  const double step = 1.0 / lipschitz;
  RunMonitor monitor(problem, config);
  absl::StatusOr<Termination> t =
      monitor.Observe(0, x0, nullptr, 0.0, step);
  if (!t.ok()) return t.status();
  Vector x = x0;
  Vector y = x0;
  double momentum = 1.0;
  int64_t steps = 0;
  while (*t == Termination::kContinue) {
    absl::StatusOr<Vector> fy = problem.Operator(y);
    if (!fy.ok()) return fy.status();
    absl::StatusOr<Vector> x_next = problem.Prox(y - step * *fy, step);
    if (!x_next.ok()) return x_next.status();
    const double d_n = (*x_next - y).squaredNorm() + (y - x).squaredNorm();
    const double momentum_next = FistaMomentum(momentum);
    y = *x_next + ((momentum - 1.0) / momentum_next) * (*x_next - x);
    x = *std::move(x_next);
    momentum = momentum_next;
    ++steps;
    t = monitor.Observe(steps, x, nullptr, d_n, step);
    if (!t.ok()) return t.status();
  }
  return monitor.Finish(*t, x, steps);
}

}  // namespace grvi
