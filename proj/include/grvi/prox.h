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

// Closed-form proximal operators.

#ifndef GRVI_PROX_H_
#define GRVI_PROX_H_

#include <variant>

#include "absl/status/statusor.h"
#include "grvi/core.h"

namespace grvi {

struct ZeroFunction {};

// weight * ||x||_1
struct L1Norm {
  double weight = 1.0;
};

// Indicator of the nonnegative orthant.
struct NonnegIndicator {};

// Indicator of {x : lo <= x <= hi}; entries of hi may be +infinity and entries
// of lo may be -infinity.
struct BoxIndicator {
  Vector lo;
  Vector hi;
};

using ProxKind =
    std::variant<ZeroFunction, L1Norm, NonnegIndicator, BoxIndicator>;

Vector ProxZero(const Vector& z, double lambda);

// Soft thresholding at lambda * weight.
Vector ProxL1(const Vector& z, double lambda, double weight);

Vector ProxNonneg(const Vector& z, double lambda);

absl::StatusOr<Vector> ProxBox(const Vector& z, double lambda, const Vector& lo,
                               const Vector& hi);

absl::Status ValidateProxKind(const ProxKind& kind);

// g(x) for the given kind (+infinity outside the domain of an indicator).
double ProxKindValue(const ProxKind& kind, const Vector& x);

// Wraps a validated kind as an oracle. Box dimensions are checked per call.
absl::StatusOr<ProxFunction> MakeProxFunction(ProxKind kind);

}  // namespace grvi

#endif  // GRVI_PROX_H_
