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

// Benchmark and synthetic problems, built as VIProblem instances.
//
// All random data comes from std::mt19937_64, whose output sequence is fixed
// by the C++ standard. Raw 64-bit draws are mapped to doubles by the helpers
// below (not by <random> distributions, whose algorithms are
// implementation-defined), so every generated instance is bit-reproducible
// from its seed on any conforming toolchain.

#ifndef GRVI_PROBLEMS_H_
#define GRVI_PROBLEMS_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <ostream>
#include <random>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "grvi/core.h"
#include "grvi/prox.h"

namespace grvi {

// Uniform on (0, 1]: ((draw >> 11) + 1) * 2^-53.
double UniformOpenClosed(std::mt19937_64& rng);
// Uniform on [-1, 1).
double UniformSymmetric(std::mt19937_64& rng);
// +1 or -1 with equal probability, from the top bit of one draw.
double Rademacher(std::mt19937_64& rng);

// Point with entries uniform on (0, 1].
Vector RandomPoint(int dim, uint64_t seed);

// Largest eigenvalue of a symmetric positive semidefinite operator by power
// iteration, stopping once the Rayleigh quotient changes by at most
// rel_tol relative. Fails after max_iter steps without convergence.
absl::StatusOr<double> PowerIterationMaxEigenvalue(
    const std::function<Vector(const Vector&)>& apply, int dim,
    double rel_tol = 1e-8, int max_iter = 10000);

// ||A||_2 via power iteration on A^T A.
absl::StatusOr<double> SpectralNorm(const Matrix& a, double rel_tol = 1e-8,
                                    int max_iter = 10000);

// ---------------------------------------------------------------------------
// Sparse logistic regression
//
//   min_x  sum_i log(1 + exp(-b_i <a_i, x>)) + reg_weight * ||x||_1
//
// written as f(x) = sum_i log(1 + exp((Kx)_i)) with K_ij = -b_i a_ij.
// ---------------------------------------------------------------------------

// Which matrix the default regularization weight 0.005 * ||M^T b||_inf is
// computed from. The default is the data matrix A.
enum class RegWeightSource { kA, kK };

struct LogisticDataset {
  Matrix a;  // N x m, rows a_i
  Vector b;  // entries in {-1, +1}
  Matrix k;  // K_ij = -b_i a_ij
  double reg_weight = 0.0;
  RegWeightSource reg_source = RegWeightSource::kA;
  uint64_t seed = 0;

  int num_samples() const { return static_cast<int>(a.rows()); }
  int dim() const { return static_cast<int>(a.cols()); }
};

double DefaultRegWeight(const Matrix& a, const Vector& b,
                        RegWeightSource source);

// A entries uniform on (0, 1] drawn row by row, then b entries Rademacher,
// all from one mt19937_64 stream seeded with `seed`.
absl::StatusOr<LogisticDataset> GenerateLogisticDataset(
    int num_samples, int dim, uint64_t seed,
    RegWeightSource source = RegWeightSource::kA);

// Builds K from A and b and checks b_i in {-1, +1}.
absl::StatusOr<LogisticDataset> MakeLogisticDataset(Matrix a, Vector b,
                                                    double reg_weight,
                                                    uint64_t seed);

// K^T sigma(Kx) with the sigmoid evaluated without overflow.
Vector LogisticGradient(const LogisticDataset& data, const Vector& x);
// sum_i log(1 + exp((Kx)_i)).
double LogisticLoss(const LogisticDataset& data, const Vector& x);

// ||K^T K||_2 / 4, the Lipschitz constant of the gradient.
absl::StatusOr<double> LogisticLipschitz(const LogisticDataset& data);

absl::StatusOr<VIProblem> LogisticProblem(
    std::shared_ptr<const LogisticDataset> data);

// Plain-text dataset file: one header line
//   N=<N> m=<m> seed=<seed> reg_weight=<w> reg_source=<A|K>
// followed by N rows "a_i1 ... a_im b_i". Doubles are written with 17
// significant digits so a round trip is exact.
absl::Status WriteLogisticDataset(const LogisticDataset& data,
                                  std::ostream& out);
absl::StatusOr<LogisticDataset> ReadLogisticDataset(std::istream& in);

// ---------------------------------------------------------------------------
// Sun's nonlinear complementarity operator on the nonnegative orthant
//
//   F(x) = F1(x) + D x + c,
//   F1_i(x) = x_{i-1}^2 + x_i^2 + x_{i-1} x_i + x_i x_{i+1},  x_0 = x_{m+1} = 0,
//
// with D tridiagonal (4 on the diagonal, 1 below, -2 above) and c = -1.
// ---------------------------------------------------------------------------

struct SunProblemSpec {
  int m = 0;
  Matrix d;
  Vector c;
};

absl::StatusOr<SunProblemSpec> MakeSunSpec(int m);

// Evaluates F with the three-point stencil of D.
absl::StatusOr<Vector> SunOperator(const SunProblemSpec& spec,
                                   const Vector& x);

// g = indicator of the nonnegative orthant; no Lipschitz constant declared.
absl::StatusOr<VIProblem> BuildSunProblem(int m);

// ---------------------------------------------------------------------------
// Affine strongly monotone VI on the nonnegative orthant, F(x) = Mx + q, with
// a planted solution.
// ---------------------------------------------------------------------------

struct AffineVISpec {
  Matrix m;
  Vector q;
  Vector known_solution;
  double strong_modulus = 0.0;  // lambda_min((M + M^T) / 2)
  double lipschitz = 0.0;       // ||M||_2
};

// Plants x_dagger >= 0 as the solution: q_i = -(M x_dagger)_i where
// x_dagger_i > 0 and q_i = -(M x_dagger)_i + slack_i where x_dagger_i = 0.
// The modulus and Lipschitz constant are supplied by the caller.
absl::StatusOr<AffineVISpec> PlantAffineVI(Matrix m, const Vector& x_dagger,
                                           const Vector& slack,
                                           double strong_modulus,
                                           double lipschitz);

// M = S + modulus * I with S = (B - B^T) / (2 sqrt(dim)) and B uniform on
// [-1, 1), so (M + M^T) / 2 = modulus * I exactly. Each solution entry is 0
// or uniform on (0, 1] with equal probability; active entries get slack
// uniform on (0, 1].
absl::StatusOr<AffineVISpec> GenerateAffineVI(int dim, uint64_t seed,
                                              double modulus);

VIProblem AffineVIProblem(std::shared_ptr<const AffineVISpec> spec);

// ---------------------------------------------------------------------------
// Convex-concave saddle point  min_x max_y g1(x) + K(x, y) - g2(y)
// as the VI in z = (x, y) with F(z) = (grad_x K, -grad_y K) and
// g(z) = g1(x) + g2(y).
// ---------------------------------------------------------------------------

using PartialGradient =
    std::function<absl::StatusOr<Vector>(const Vector& x, const Vector& y)>;

absl::StatusOr<VIProblem> BuildSaddlePointVI(PartialGradient grad_x,
                                             PartialGradient grad_y,
                                             ProxFunction g1, ProxFunction g2,
                                             int mx, int ny);

// K(x, y) = <Bx, y> with B of size ny x mx, and l1 terms on both blocks.
absl::StatusOr<VIProblem> BilinearSaddleProblem(const Matrix& b,
                                                double weight_x,
                                                double weight_y);

// B entries uniform on [-1, 1).
absl::StatusOr<VIProblem> GenerateBilinearSaddle(int mx, int ny, uint64_t seed,
                                                 double weight);

}  // namespace grvi

#endif  // GRVI_PROBLEMS_H_
