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

// Post-run analysis of traces.

#ifndef GRVI_METRICS_H_
#define GRVI_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "grvi/core.h"

namespace grvi {

double DnResidual(const Vector& x_next, const Vector& x_bar,
                  const Vector& x_curr);

enum class TraceField {
  kNaturalResidual,
  kDn,
  kObjective,
  kStepsize,
  kDistToSolutionSq,
};

absl::StatusOr<TraceField> ParseTraceField(std::string_view name);

std::optional<double> FieldValue(const TraceRecord& record, TraceField field);

// Inclusive range of iteration numbers.
struct IterWindow {
  int64_t start = 0;
  int64_t end = 0;
};

// Last 80% of the iteration range covered by the trace.
IterWindow DefaultWindow(std::span<const TraceRecord> trace);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  IterWindow window;
  int num_points = 0;
};

// Least-squares fit of log(value) against log(iter). Needs at least 10 rows
// in the window, all with positive values and iter >= 1.
absl::StatusOr<RateFit> FitPowerRate(std::span<const TraceRecord> trace,
                                     TraceField field,
                                     std::optional<IterWindow> window = {});

// Least-squares fit of log(value) against iter; `ratio` is exp(slope), the
// per-iteration contraction factor.
struct GeometricFit {
  double ratio = 0.0;
  RateFit fit;
};

absl::StatusOr<GeometricFit> FitGeometricRate(
    std::span<const TraceRecord> trace, TraceField field,
    std::optional<IterWindow> window = {});

// Smallest objective value over all rows of all traces.
std::optional<double> ReferenceOptimum(
    const std::vector<std::span<const TraceRecord>>& traces);

// Iteration of the first row whose natural residual is <= tol.
std::optional<int64_t> IterationsToTolerance(std::span<const TraceRecord> trace,
                                             double tol);

}  // namespace grvi

#endif  // GRVI_METRICS_H_
