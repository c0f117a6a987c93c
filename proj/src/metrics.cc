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

#include "grvi/metrics.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace grvi {
namespace {

constexpr int kMinFitPoints = 10;

// Ordinary least squares of y on t with centered sums.
RateFit LeastSquares(const std::vector<double>& t,
                     const std::vector<double>& y) {
  const double n = static_cast<double>(t.size());
  double t_mean = 0.0, y_mean = 0.0;
  for (size_t i = 0; i < t.size(); ++i) {
    t_mean += t[i];
    y_mean += y[i];
  }
  t_mean /= n;
  y_mean /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (size_t i = 0; i < t.size(); ++i) {
    const double dt = t[i] - t_mean;
    const double dy = y[i] - y_mean;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  RateFit fit;
  fit.slope = sty / stt;
  fit.intercept = y_mean - fit.slope * t_mean;
  double sse = 0.0;
  for (size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * t[i]);
    sse += r * r;
  }
  // A constant series is fitted exactly.
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  fit.num_points = static_cast<int>(t.size());
  return fit;
}

absl::StatusOr<RateFit> FitLog(std::span<const TraceRecord> trace,
                               TraceField field,
                               std::optional<IterWindow> window,
                               bool log_abscissa) {
  const IterWindow w = window.value_or(DefaultWindow(trace));
  if (!(w.start < w.end)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "fit window [%d, %d] is empty", w.start, w.end));
  }
  std::vector<double> t, y;
  for (const TraceRecord& record : trace) {
    if (record.iter < w.start || record.iter > w.end) continue;
    const std::optional<double> value = FieldValue(record, field);
    if (!value.has_value()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "trace row %d has no value for the fitted field", record.iter));
    }
    if (!(*value > 0.0) || !std::isfinite(*value)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "trace row %d has non-positive value %g", record.iter, *value));
    }
    if (log_abscissa && record.iter < 1) {
      return absl::InvalidArgumentError(
          "power-law fit needs iteration numbers >= 1");
    }
    const double n = static_cast<double>(record.iter);
    t.push_back(log_abscissa ? std::log(n) : n);
    y.push_back(std::log(*value));
  }
  if (static_cast<int>(t.size()) < kMinFitPoints) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "fit window [%d, %d] holds %d rows, need at least %d", w.start, w.end,
        t.size(), kMinFitPoints));
  }
  RateFit fit = LeastSquares(t, y);
  fit.window = w;
  return fit;
}

}  // namespace

double DnResidual(const Vector& x_next, const Vector& x_bar,
                  const Vector& x_curr) {
  return (x_next - x_bar).squaredNorm() + (x_bar - x_curr).squaredNorm();
}

absl::StatusOr<TraceField> ParseTraceField(std::string_view name) {
  if (name == "natural_residual") return TraceField::kNaturalResidual;
  if (name == "d_n") return TraceField::kDn;
  if (name == "objective") return TraceField::kObjective;
  if (name == "stepsize") return TraceField::kStepsize;
  if (name == "dist_sq") return TraceField::kDistToSolutionSq;
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown trace field '%s'", std::string(name)));
}

std::optional<double> FieldValue(const TraceRecord& record, TraceField field) {
  switch (field) {
    case TraceField::kNaturalResidual:
      return record.natural_residual;
    case TraceField::kDn:
      return record.d_n;
    case TraceField::kObjective:
      return record.objective;
    case TraceField::kStepsize:
      return record.stepsize;
    case TraceField::kDistToSolutionSq:
      return record.dist_to_solution_sq;
  }
  return std::nullopt;
}

IterWindow DefaultWindow(std::span<const TraceRecord> trace) {
  if (trace.empty()) return {};
  const int64_t first = trace.front().iter;
  const int64_t last = trace.back().iter;
  const int64_t skip = (last - first) / 5;
  return {first + skip, last};
}

absl::StatusOr<RateFit> FitPowerRate(std::span<const TraceRecord> trace,
                                     TraceField field,
                                     std::optional<IterWindow> window) {
  return FitLog(trace, field, window, /*log_abscissa=*/true);
}

absl::StatusOr<GeometricFit> FitGeometricRate(
    std::span<const TraceRecord> trace, TraceField field,
    std::optional<IterWindow> window) {
  absl::StatusOr<RateFit> fit =
      FitLog(trace, field, window, /*log_abscissa=*/false);
  if (!fit.ok()) return fit.status();
  return GeometricFit{std::exp(fit->slope), *fit};
}

std::optional<double> ReferenceOptimum(
    const std::vector<std::span<const TraceRecord>>& traces) {
  std::optional<double> best;
  for (std::span<const TraceRecord> trace : traces) {
    for (const TraceRecord& record : trace) {
      if (!record.objective.has_value() || !std::isfinite(*record.objective)) {
        continue;
      }
      if (!best.has_value() || *record.objective < *best) {
        best = record.objective;
      }
    }
  }
  return best;
}

std::optional<int64_t> IterationsToTolerance(std::span<const TraceRecord> trace,
                                             double tol) {
  for (const TraceRecord& record : trace) {
    if (record.natural_residual <= tol) return record.iter;
  }
  return std::nullopt;
}

}  // namespace grvi
