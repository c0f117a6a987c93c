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

#include "grvi/prox.h"

#include <cmath>
#include <limits>
#include <utility>
#include <variant>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace grvi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Vector ProxZero(const Vector& z, double /*lambda*/) { return z; }

Vector ProxL1(const Vector& z, double lambda, double weight) {
  const double tau = lambda * weight;
  Vector out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double shrunk = std::abs(z[i]) - tau;
    out[i] = shrunk > 0.0 ? std::copysign(shrunk, z[i]) : 0.0;
  }
  return out;
}

Vector ProxNonneg(const Vector& z, double /*lambda*/) {
  return z.cwiseMax(0.0);
}

absl::StatusOr<Vector> ProxBox(const Vector& z, double /*lambda*/,
                               const Vector& lo, const Vector& hi) {
  if (lo.size() != z.size() || hi.size() != z.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "ProxBox: bounds have dimensions (%d, %d), input has %d", lo.size(),
        hi.size(), z.size()));
  }
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (lo[i] > hi[i]) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "ProxBox: lo[%d] = %g exceeds hi[%d] = %g", i, lo[i], i, hi[i]));
    }
  }
  return z.cwiseMax(lo).cwiseMin(hi);
}

absl::Status ValidateProxKind(const ProxKind& kind) {
  return std::visit(
      Overloaded{
          [](const ZeroFunction&) { return absl::OkStatus(); },
          [](const L1Norm& l1) {
            if (!(l1.weight > 0.0) || !std::isfinite(l1.weight)) {
              return absl::InvalidArgumentError(absl::StrFormat(
                  "l1 weight must be positive and finite, got %g", l1.weight));
            }
            return absl::OkStatus();
          },
          [](const NonnegIndicator&) { return absl::OkStatus(); },
          [](const BoxIndicator& box) {
            if (box.lo.size() != box.hi.size()) {
              return absl::InvalidArgumentError(
                  "box bounds have different dimensions");
            }
            for (Eigen::Index i = 0; i < box.lo.size(); ++i) {
              if (box.lo[i] > box.hi[i]) {
                return absl::InvalidArgumentError(absl::StrFormat(
                    "box lo[%d] = %g exceeds hi[%d] = %g", i, box.lo[i], i,
                    box.hi[i]));
              }
            }
            return absl::OkStatus();
          },
      },
      kind);
}

double ProxKindValue(const ProxKind& kind, const Vector& x) {
  return std::visit(
      Overloaded{
          [](const ZeroFunction&) { return 0.0; },
          [&x](const L1Norm& l1) { return l1.weight * x.lpNorm<1>(); },
          [&x](const NonnegIndicator&) {
            return (x.array() >= 0.0).all() ? 0.0 : kInf;
          },
          [&x](const BoxIndicator& box) {
            return (x.array() >= box.lo.array() && x.array() <= box.hi.array())
                           .all()
                       ? 0.0
                       : kInf;
          },
      },
      kind);
}

absl::StatusOr<ProxFunction> MakeProxFunction(ProxKind kind) {
  if (absl::Status s = ValidateProxKind(kind); !s.ok()) return s;
  ProxFunction fn;
  fn.value = [kind](const Vector& x) { return ProxKindValue(kind, x); };
  fn.prox = std::visit(
      Overloaded{
          [](const ZeroFunction&)
              -> std::function<absl::StatusOr<Vector>(const Vector&, double)> {
            return [](const Vector& z, double lambda) -> absl::StatusOr<Vector> {
              return ProxZero(z, lambda);
            };
          },
          [](const L1Norm& l1)
              -> std::function<absl::StatusOr<Vector>(const Vector&, double)> {
            return [w = l1.weight](const Vector& z,
                                   double lambda) -> absl::StatusOr<Vector> {
              return ProxL1(z, lambda, w);
            };
          },
          [](const NonnegIndicator&)
              -> std::function<absl::StatusOr<Vector>(const Vector&, double)> {
            return [](const Vector& z, double lambda) -> absl::StatusOr<Vector> {
              return ProxNonneg(z, lambda);
            };
          },
          [](const BoxIndicator& box)
              -> std::function<absl::StatusOr<Vector>(const Vector&, double)> {
            return [box](const Vector& z, double lambda) {
              return ProxBox(z, lambda, box.lo, box.hi);
            };
          },
      },
      kind);
  return fn;
}

}  // namespace grvi
