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

#include "grvi/core.h"

#include <cmath>
#include <memory>
#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"

namespace grvi {

double GoldenRatio() { return kGoldenRatio; }

absl::StatusOr<Vector> GoldenRatioAverage(const Vector& x_n,
                                          const Vector& x_bar_prev) {
  if (x_n.size() != x_bar_prev.size()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("GoldenRatioAverage: dimension mismatch (%d vs %d)",
                        x_n.size(), x_bar_prev.size()));
  }
  return GoldenRatioAverage(x_n, x_bar_prev, kGoldenRatio);
}

Vector GoldenRatioAverage(const Vector& x_n, const Vector& x_bar_prev,
                          double phi) {
  return ((phi - 1.0) * x_n + x_bar_prev) / phi;
}

absl::StatusOr<Vector> VIProblem::Operator(const Vector& x) const {
  if (x.size() != dim) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%s: operator input has dimension %d, expected %d", name, x.size(),
        dim));
  }
  absl::StatusOr<Vector> fx = op.eval(x);
  if (!fx.ok()) return fx.status();
  if (fx->size() != dim) {
    return absl::InternalError(absl::StrFormat(
        "%s: operator returned dimension %d, expected %d", name, fx->size(),
        dim));
  }
  return fx;
}

absl::StatusOr<Vector> VIProblem::Prox(const Vector& z, double lambda) const {
  if (z.size() != dim) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%s: prox input has dimension %d, expected %d", name, z.size(), dim));
  }
  if (!(lambda > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s: prox parameter must be positive, got %g", name,
                        lambda));
  }
  absl::StatusOr<Vector> p = g.prox(z, lambda);
  if (!p.ok()) return p.status();
  if (p->size() != dim) {
    return absl::InternalError(absl::StrFormat(
        "%s: prox returned dimension %d, expected %d", name, p->size(), dim));
  }
  return p;
}

absl::Status VIProblem::Validate() const {
  if (dim < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s: dimension must be positive, got %d", name, dim));
  }
  if (!op.eval) {
    return absl::InvalidArgumentError(name + ": missing operator oracle");
  }
  if (!g.prox) {
    return absl::InvalidArgumentError(name + ": missing prox oracle");
  }
  if (known_solution.has_value() && known_solution->size() != dim) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%s: known solution has dimension %d, expected %d", name,
        known_solution->size(), dim));
  }
  return absl::OkStatus();
}

VIProblem Instrument(const VIProblem& problem,
                     std::shared_ptr<OracleCounters> counters) {
  VIProblem out = problem;
  out.op.eval = [inner = problem.op.eval,
                 counters](const Vector& x) -> absl::StatusOr<Vector> {
    counters->operator_calls.fetch_add(1, std::memory_order_relaxed);
    return inner(x);
  };
  out.g.prox = [inner = problem.g.prox, counters](
                   const Vector& z, double lambda) -> absl::StatusOr<Vector> {
    counters->prox_calls.fetch_add(1, std::memory_order_relaxed);
    return inner(z, lambda);
  };
  return out;
}

absl::StatusOr<double> NaturalResidual(const VIProblem& problem,
                                       const Vector& x, double scale) {
  absl::StatusOr<Vector> fx = problem.Operator(x);
  if (!fx.ok()) return fx.status();
  return NaturalResidual(problem, x, *fx, scale);
}

absl::StatusOr<double> NaturalResidual(const VIProblem& problem,
                                       const Vector& x, const Vector& fx,
                                       double scale) {
  if (!(scale > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("natural residual scale must be positive, got %g",
                        scale));
  }
  absl::StatusOr<Vector> p = problem.Prox(x - scale * fx, scale);
  if (!p.ok()) return p.status();
  return (x - *p).norm();
}

std::string_view TerminationName(Termination t) {
  switch (t) {
    case Termination::kContinue:
      return "continue";
    case Termination::kConverged:
      return "converged";
    case Termination::kMaxIter:
      return "max_iter";
    case Termination::kDiverged:
      return "diverged";
  }
  return "unknown";
}

Termination CheckTermination(const TraceRecord& record,
                             const SolverConfig& config) {
  if (!std::isfinite(record.iterate_norm) ||
      record.iterate_norm > config.divergence_bound ||
      !std::isfinite(record.natural_residual)) {
    return Termination::kDiverged;
  }
  if (config.tol > 0.0 && record.natural_residual <= config.tol) {
    return Termination::kConverged;
  }
  if (record.iter >= config.max_iter) return Termination::kMaxIter;
  return Termination::kContinue;
}

}  // namespace grvi
