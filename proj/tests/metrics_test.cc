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

#include <cmath>
#include <vector>

#include "gtest/gtest.h"

namespace grvi {
namespace {

// Rows n = first..last with dist_sq = value(n) and natural residual
// residual(n).
template <typename F>
std::vector<TraceRecord> MakeTrace(int64_t first, int64_t last, F value) {
  std::vector<TraceRecord> trace;
  for (int64_t n = first; n <= last; ++n) {
    TraceRecord r;
    r.iter = n;
    r.dist_to_solution_sq = value(static_cast<double>(n));
    r.natural_residual = value(static_cast<double>(n));
    trace.push_back(r);
  }
  return trace;
}

TEST(DnResidualTest, HandExample) {
  Vector next(2), bar(2), curr(2);
  next << 1.0, 1.0;
  bar << 0.0, 1.0;
  curr << 0.0, 3.0;
  EXPECT_DOUBLE_EQ(DnResidual(next, bar, curr), 1.0 + 4.0);
  EXPECT_EQ(DnResidual(curr, curr, curr), 0.0);
}

TEST(TraceFieldTest, ParsesColumnNames) {
  EXPECT_EQ(*ParseTraceField("natural_residual"), TraceField::kNaturalResidual);
  EXPECT_EQ(*ParseTraceField("d_n"), TraceField::kDn);
  EXPECT_EQ(*ParseTraceField("objective"), TraceField::kObjective);
  EXPECT_EQ(*ParseTraceField("stepsize"), TraceField::kStepsize);
  EXPECT_EQ(*ParseTraceField("dist_sq"), TraceField::kDistToSolutionSq);
  EXPECT_FALSE(ParseTraceField("distance").ok());
}

TEST(TraceFieldTest, FieldValueReadsOptionalColumns) {
  TraceRecord r;
  r.stepsize = 0.5;
  EXPECT_EQ(*FieldValue(r, TraceField::kStepsize), 0.5);
  EXPECT_FALSE(FieldValue(r, TraceField::kObjective).has_value());
  r.objective = 3.0;
  EXPECT_EQ(*FieldValue(r, TraceField::kObjective), 3.0);
}

TEST(WindowTest, DefaultSkipsFirstFifth) {
  const auto trace = MakeTrace(0, 100, [](double) { return 1.0; });
  const IterWindow w = DefaultWindow(trace);
  EXPECT_EQ(w.start, 20);
  EXPECT_EQ(w.end, 100);
  const IterWindow empty = DefaultWindow({});
  EXPECT_EQ(empty.start, 0);
  EXPECT_EQ(empty.end, 0);
}

TEST(PowerFitTest, RecoversExactExponent) {
  const auto trace =
      MakeTrace(1, 1000, [](double n) { return 3.0 * std::pow(n, -0.75); });
  const RateFit fit = *FitPowerRate(trace, TraceField::kDistToSolutionSq);
  EXPECT_NEAR(fit.slope, -0.75, 1e-12);
  EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-10);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_EQ(fit.window.start, 200);
  EXPECT_EQ(fit.num_points, 801);
}

TEST(PowerFitTest, ExplicitWindow) {
  const auto trace = MakeTrace(1, 100, [](double n) {
    return n <= 50 ? 1.0 / n : 50.0 / (n * n);
  });
  const RateFit head =
      *FitPowerRate(trace, TraceField::kNaturalResidual, IterWindow{1, 50});
  const RateFit tail =
      *FitPowerRate(trace, TraceField::kNaturalResidual, IterWindow{50, 100});
  EXPECT_NEAR(head.slope, -1.0, 1e-12);
  EXPECT_NEAR(tail.slope, -2.0, 1e-12);
}

TEST(GeometricFitTest, RecoversExactRatio) {
  const auto trace =
      MakeTrace(0, 200, [](double n) { return 5.0 * std::pow(0.9, n); });
  const GeometricFit fit = *FitGeometricRate(trace, TraceField::kDistToSolutionSq);
  EXPECT_NEAR(fit.ratio, 0.9, 1e-12);
  EXPECT_NEAR(fit.fit.r_squared, 1.0, 1e-12);
}

TEST(FitErrorsTest, RejectsBadInput) {
  const auto positive = MakeTrace(0, 100, [](double n) { return 1.0 + n; });
  // Too few rows.
  EXPECT_FALSE(
      FitPowerRate(positive, TraceField::kDistToSolutionSq, IterWindow{1, 5})
          .ok());
  // Empty window.
  EXPECT_FALSE(
      FitPowerRate(positive, TraceField::kDistToSolutionSq, IterWindow{50, 50})
          .ok());
  // Iteration 0 inside a power-law window.
  EXPECT_FALSE(
      FitPowerRate(positive, TraceField::kDistToSolutionSq, IterWindow{0, 50})
          .ok());
  EXPECT_TRUE(
      FitGeometricRate(positive, TraceField::kDistToSolutionSq, IterWindow{0, 50})
          .ok());
  // Zero value.
  auto with_zero = positive;
  with_zero[60].dist_to_solution_sq = 0.0;
  EXPECT_FALSE(FitGeometricRate(with_zero, TraceField::kDistToSolutionSq).ok());
  // Missing column.
  EXPECT_FALSE(FitGeometricRate(positive, TraceField::kObjective).ok());
}

TEST(ReferenceOptimumTest, MinimumOverAllTraces) {
  std::vector<TraceRecord> a(3), b(2);
  a[0].objective = 5.0;
  a[1].objective = 2.0;
  // a[2] has no objective.
  b[0].objective = 3.0;
  b[1].objective = std::nan("");
  EXPECT_EQ(*ReferenceOptimum({a, b}), 2.0);
  EXPECT_EQ(*ReferenceOptimum({b}), 3.0);
  std::vector<TraceRecord> none(4);
  EXPECT_FALSE(ReferenceOptimum({none}).has_value());
  EXPECT_FALSE(ReferenceOptimum({}).has_value());
}

TEST(IterationsToToleranceTest, FirstRowBelowTolerance) {
  const auto trace = MakeTrace(0, 100, [](double n) { return 1.0 / (1.0 + n); });
  EXPECT_EQ(*IterationsToTolerance(trace, 0.1), 9);
  EXPECT_EQ(*IterationsToTolerance(trace, 1.0), 0);
  EXPECT_FALSE(IterationsToTolerance(trace, 1e-3).has_value());
  EXPECT_FALSE(IterationsToTolerance({}, 1.0).has_value());
}

}  // namespace
}  // namespace grvi
