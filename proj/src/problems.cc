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

#include "grvi/problems.h"

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"

namespace grvi {

double UniformOpenClosed(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

double UniformSymmetric(std::mt19937_64& rng) {
  // (draw >> 11) * 2^-52 lies in [0, 2).
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

double Rademacher(std::mt19937_64& rng) {
  return (rng() >> 63) != 0 ? 1.0 : -1.0;
}

Vector RandomPoint(int dim, uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vector x(dim);
  for (int i = 0; i < dim; ++i) x[i] = UniformOpenClosed(rng);
  return x;
}

absl::StatusOr<double> PowerIterationMaxEigenvalue(
    const std::function<Vector(const Vector&)>& apply, int dim, double rel_tol,
    int max_iter) {
  if (dim < 1) return absl::InvalidArgumentError("power iteration: dim < 1");
  // Fixed pseudo-random start so that results do not depend on call order.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = 1.0 + 0.5 * UniformSymmetric(rng);
  v.normalize();
  double estimate = 0.0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    Vector w = apply(v);
    const double rayleigh = v.dot(w);
    const double norm = w.norm();
    if (!std::isfinite(norm)) {
      return absl::InternalError("power iteration produced non-finite values");
    }
    if (norm == 0.0) return 0.0;  // v is in the null space of a PSD operator
    if (iter > 1 &&
        std::abs(rayleigh - estimate) <= rel_tol * std::abs(rayleigh)) {
      return rayleigh;
    }
    estimate = rayleigh;
    v = w / norm;
  }
  return absl::DeadlineExceededError(absl::StrFormat(
      "power iteration did not reach relative tolerance %g in %d steps",
      rel_tol, max_iter));
}

absl::StatusOr<double> SpectralNorm(const Matrix& a, double rel_tol,
                                    int max_iter) {
  absl::StatusOr<double> top = PowerIterationMaxEigenvalue(
      [&a](const Vector& v) -> Vector { return a.transpose() * (a * v); },
      static_cast<int>(a.cols()), rel_tol, max_iter);
  if (!top.ok()) return top.status();
  return std::sqrt(std::max(*top, 0.0));
}

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

double DefaultRegWeight(const Matrix& a, const Vector& b,
                        RegWeightSource source) {
  if (source == RegWeightSource::kA) {
    return 0.005 * (a.transpose() * b).lpNorm<Eigen::Infinity>();
  }
  const Matrix k = -(b.asDiagonal() * a);
  return 0.005 * (k.transpose() * b).lpNorm<Eigen::Infinity>();
}

absl::StatusOr<LogisticDataset> MakeLogisticDataset(Matrix a, Vector b,
                                                    double reg_weight,
                                                    uint64_t seed) {
  if (a.rows() < 1 || a.cols() < 1) {
    return absl::InvalidArgumentError("logistic dataset: empty data matrix");
  }
  if (b.size() != a.rows()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "logistic dataset: %d labels for %d samples", b.size(), a.rows()));
  }
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (b[i] != 1.0 && b[i] != -1.0) {
      return absl::InvalidArgumentError(
          absl::StrFormat("logistic dataset: label b[%d] = %g is not +-1", i,
                          b[i]));
    }
  }
  if (!(reg_weight > 0.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "logistic dataset: regularization weight must be positive, got %g",
        reg_weight));
  }
  LogisticDataset data;
  data.k = -(b.asDiagonal() * a);
  data.a = std::move(a);
  data.b = std::move(b);
  data.reg_weight = reg_weight;
  data.seed = seed;
  return data;
}

absl::StatusOr<LogisticDataset> GenerateLogisticDataset(int num_samples,
                                                        int dim, uint64_t seed,
                                                        RegWeightSource source) {
  if (num_samples < 1 || dim < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "logistic dataset needs N, m >= 1, got N=%d m=%d", num_samples, dim));
  }
  std::mt19937_64 rng(seed);
  Matrix a(num_samples, dim);
  for (int i = 0; i < num_samples; ++i) {
    for (int j = 0; j < dim; ++j) a(i, j) = UniformOpenClosed(rng);
  }
  Vector b(num_samples);
  for (int i = 0; i < num_samples; ++i) b[i] = Rademacher(rng);
  const double weight = DefaultRegWeight(a, b, source);
  absl::StatusOr<LogisticDataset> data =
      MakeLogisticDataset(std::move(a), std::move(b), weight, seed);
  if (data.ok()) data->reg_source = source;
  return data;
}

Vector LogisticGradient(const LogisticDataset& data, const Vector& x) {
  const Vector y = data.k * x;
  Vector sigma(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] >= 0.0) {
      sigma[i] = 1.0 / (1.0 + std::exp(-y[i]));
    } else {
      const double e = std::exp(y[i]);
      sigma[i] = e / (1.0 + e);
    }
  }
  return data.k.transpose() * sigma;
}

double LogisticLoss(const LogisticDataset& data, const Vector& x) {
  const Vector y = data.k * x;
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    total += y[i] > 0.0 ? y[i] + std::log1p(std::exp(-y[i]))
                        : std::log1p(std::exp(y[i]));
  }
  return total;
}

absl::StatusOr<double> LogisticLipschitz(const LogisticDataset& data) {
  const Matrix& k = data.k;
  absl::StatusOr<double> top = PowerIterationMaxEigenvalue(
      [&k](const Vector& v) -> Vector { return k.transpose() * (k * v); },
      data.dim());
  if (!top.ok()) return top.status();
  return *top / 4.0;
}

absl::StatusOr<VIProblem> LogisticProblem(
    std::shared_ptr<const LogisticDataset> data) {
  absl::StatusOr<double> lipschitz = LogisticLipschitz(*data);
  if (!lipschitz.ok()) return lipschitz.status();
  absl::StatusOr<ProxFunction> g = MakeProxFunction(L1Norm{data->reg_weight});
  if (!g.ok()) return g.status();

  VIProblem problem;
  problem.name = absl::StrFormat("logistic(N=%d,m=%d,seed=%d)",
                                 data->num_samples(), data->dim(), data->seed);
  problem.dim = data->dim();
  problem.op.eval = [data](const Vector& x) -> absl::StatusOr<Vector> {
    return LogisticGradient(*data, x);
  };
  problem.op.lipschitz = *lipschitz;
  problem.g = *std::move(g);
  problem.objective = [data](const Vector& x) {
    return LogisticLoss(*data, x) + data->reg_weight * x.lpNorm<1>();
  };
  return problem;
}

absl::Status WriteLogisticDataset(const LogisticDataset& data,
                                  std::ostream& out) {
  out << absl::StrFormat("N=%d m=%d seed=%d reg_weight=%.17g reg_source=%s\n",
                         data.num_samples(), data.dim(), data.seed,
                         data.reg_weight,
                         data.reg_source == RegWeightSource::kA ? "A" : "K");
  for (int i = 0; i < data.num_samples(); ++i) {
    for (int j = 0; j < data.dim(); ++j) {
      out << absl::StrFormat("%.17g ", data.a(i, j));
    }
    out << absl::StrFormat("%.17g\n", data.b[i]);
  }
  if (!out) return absl::DataLossError("failed writing logistic dataset");
  return absl::OkStatus();
}

absl::StatusOr<LogisticDataset> ReadLogisticDataset(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) {
    return absl::InvalidArgumentError("dataset file: missing header line");
  }
  int64_t num_samples = -1, dim = -1;
  uint64_t seed = 0;
  double reg_weight = 0.0;
  RegWeightSource source = RegWeightSource::kA;
  bool have_seed = false, have_weight = false;
  for (absl::string_view field :
       absl::StrSplit(header, ' ', absl::SkipEmpty())) {
    std::pair<absl::string_view, absl::string_view> kv =
        absl::StrSplit(field, absl::MaxSplits('=', 1));
    bool ok = true;
    if (kv.first == "N") {
      ok = absl::SimpleAtoi(kv.second, &num_samples);
    } else if (kv.first == "m") {
      ok = absl::SimpleAtoi(kv.second, &dim);
    } else if (kv.first == "seed") {
      ok = have_seed = absl::SimpleAtoi(kv.second, &seed);
    } else if (kv.first == "reg_weight") {
      ok = have_weight = absl::SimpleAtod(kv.second, &reg_weight);
    } else if (kv.first == "reg_source") {
      ok = kv.second == "A" || kv.second == "K";
      source = kv.second == "K" ? RegWeightSource::kK : RegWeightSource::kA;
    } else {
      ok = false;
    }
    if (!ok) {
      return absl::InvalidArgumentError(
          absl::StrFormat("dataset file: bad header field '%s'", field));
    }
  }
  if (num_samples < 1 || dim < 1 || !have_seed || !have_weight) {
    return absl::InvalidArgumentError(
        "dataset file: header needs N, m, seed and reg_weight");
  }
  Matrix a(num_samples, dim);
  Vector b(num_samples);
  std::string line;
  for (int64_t i = 0; i < num_samples; ++i) {
    if (!std::getline(in, line)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "dataset file: expected %d rows, found %d", num_samples, i));
    }
    int64_t j = 0;
    for (absl::string_view token :
         absl::StrSplit(line, ' ', absl::SkipEmpty())) {
      double value;
      if (j > dim || !absl::SimpleAtod(token, &value)) {
        return absl::InvalidArgumentError(
            absl::StrFormat("dataset file: malformed row %d", i + 1));
      }
      if (j < dim) {
        a(i, j) = value;
      } else {
        b[i] = value;
      }
      ++j;
    }
    if (j != dim + 1) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "dataset file: row %d has %d columns, expected %d", i + 1, j,
          dim + 1));
    }
  }
  absl::StatusOr<LogisticDataset> data =
      MakeLogisticDataset(std::move(a), std::move(b), reg_weight, seed);
  if (data.ok()) data->reg_source = source;
  return data;
}

// ---------------------------------------------------------------------------
// Sun's operator
// ---------------------------------------------------------------------------

absl::StatusOr<SunProblemSpec> MakeSunSpec(int m) {
  if (m < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("Sun problem needs m >= 1, got %d", m));
  }
  SunProblemSpec spec;
  spec.m = m;
  spec.d = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    spec.d(i, i) = 4.0;
    if (i > 0) spec.d(i, i - 1) = 1.0;
    if (i + 1 < m) spec.d(i, i + 1) = -2.0;
  }
  spec.c = Vector::Constant(m, -1.0);
  return spec;
}

absl::StatusOr<Vector> SunOperator(const SunProblemSpec& spec,
                                   const Vector& x) {
  const int m = spec.m;
  if (x.size() != m) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "Sun operator: input has dimension %d, expected %d", x.size(), m));
  }
  Vector out(m);
  for (int i = 0; i < m; ++i) {
    const double left = i > 0 ? x[i - 1] : 0.0;
    const double right = i + 1 < m ? x[i + 1] : 0.0;
    const double xi = x[i];
    const double quadratic = left * left + xi * xi + left * xi + xi * right;
    const double linear = 4.0 * xi + left - 2.0 * right;
    out[i] = quadratic + linear + spec.c[i];
  }
  return out;
}

absl::StatusOr<VIProblem> BuildSunProblem(int m) {
  absl::StatusOr<SunProblemSpec> spec = MakeSunSpec(m);
  if (!spec.ok()) return spec.status();
  auto shared = std::make_shared<const SunProblemSpec>(*std::move(spec));
  absl::StatusOr<ProxFunction> g = MakeProxFunction(NonnegIndicator{});
  if (!g.ok()) return g.status();

  VIProblem problem;
  problem.name = absl::StrFormat("sun(m=%d)", m);
  problem.dim = m;
  problem.op.eval = [shared](const Vector& x) {
    return SunOperator(*shared, x);
  };
  problem.g = *std::move(g);
  return problem;
}

// ---------------------------------------------------------------------------
// Affine VI with planted solution
// ---------------------------------------------------------------------------

absl::StatusOr<AffineVISpec> PlantAffineVI(Matrix m, const Vector& x_dagger,
                                           const Vector& slack,
                                           double strong_modulus,
                                           double lipschitz) {
  const Eigen::Index dim = x_dagger.size();
  if (dim < 1 || m.rows() != dim || m.cols() != dim || slack.size() != dim) {
    return absl::InvalidArgumentError("PlantAffineVI: dimension mismatch");
  }
  if ((x_dagger.array() < 0.0).any() || (slack.array() < 0.0).any()) {
    return absl::InvalidArgumentError(
        "PlantAffineVI: solution and slack must be nonnegative");
  }
  if (!(strong_modulus > 0.0) || !(lipschitz > 0.0)) {
    return absl::InvalidArgumentError(
        "PlantAffineVI: modulus and Lipschitz constant must be positive");
  }
  AffineVISpec spec;
  const Vector mx = m * x_dagger;
  spec.q = -mx;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (x_dagger[i] == 0.0) spec.q[i] += slack[i];
  }
  spec.m = std::move(m);
  spec.known_solution = x_dagger;
  spec.strong_modulus = strong_modulus;
  spec.lipschitz = lipschitz;
  return spec;
}

absl::StatusOr<AffineVISpec> GenerateAffineVI(int dim, uint64_t seed,
                                              double modulus) {
  if (dim < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("affine VI needs m >= 1, got %d", dim));
  }
  if (!(modulus > 0.0) || !std::isfinite(modulus)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "affine VI modulus must be positive and finite, got %g", modulus));
  }
  std::mt19937_64 rng(seed);
  Matrix b(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) b(i, j) = UniformSymmetric(rng);
  }
  // Entry-wise (b_ij - b_ji) * s is exactly the negation of (b_ji - b_ij) * s,
  // so the skew part cancels exactly in M + M^T.
  const double scale = 0.5 / std::sqrt(static_cast<double>(dim));
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) m(i, j) = (b(i, j) - b(j, i)) * scale;
  }
  m.diagonal().array() += modulus;

  Vector x_dagger(dim), slack(dim);
  for (int i = 0; i < dim; ++i) {
    const bool active = (rng() >> 63) != 0;
    const double value = UniformOpenClosed(rng);
    x_dagger[i] = active ? 0.0 : value;
    slack[i] = active ? UniformOpenClosed(rng) : 0.0;
  }
  absl::StatusOr<double> lipschitz = SpectralNorm(m);
  if (!lipschitz.ok()) return lipschitz.status();
  return PlantAffineVI(std::move(m), x_dagger, slack, modulus, *lipschitz);
}

VIProblem AffineVIProblem(std::shared_ptr<const AffineVISpec> spec) {
  VIProblem problem;
  problem.name = absl::StrFormat("affine(m=%d)", spec->q.size());
  problem.dim = static_cast<int>(spec->q.size());
  problem.op.eval = [spec](const Vector& x) -> absl::StatusOr<Vector> {
    return spec->m * x + spec->q;
  };
  problem.op.lipschitz = spec->lipschitz;
  problem.op.strong_pseudo_modulus = spec->strong_modulus;
  problem.g = *MakeProxFunction(NonnegIndicator{});
  problem.known_solution = spec->known_solution;
  return problem;
}

// ---------------------------------------------------------------------------
// Saddle points
// ---------------------------------------------------------------------------

absl::StatusOr<VIProblem> BuildSaddlePointVI(PartialGradient grad_x,
                                             PartialGradient grad_y,
                                             ProxFunction g1, ProxFunction g2,
                                             int mx, int ny) {
  if (mx < 1 || ny < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "saddle point VI needs block sizes >= 1, got %d and %d", mx, ny));
  }
  if (!grad_x || !grad_y || !g1.prox || !g2.prox) {
    return absl::InvalidArgumentError("saddle point VI: missing oracle");
  }
  VIProblem problem;
  problem.name = absl::StrFormat("saddle(mx=%d,ny=%d)", mx, ny);
  problem.dim = mx + ny;
  problem.op.eval = [grad_x = std::move(grad_x), grad_y = std::move(grad_y), mx,
                     ny](const Vector& z) -> absl::StatusOr<Vector> {
    const Vector x = z.head(mx);
    const Vector y = z.tail(ny);
    absl::StatusOr<Vector> gx = grad_x(x, y);
    if (!gx.ok()) return gx.status();
    absl::StatusOr<Vector> gy = grad_y(x, y);
    if (!gy.ok()) return gy.status();
    if (gx->size() != mx || gy->size() != ny) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "saddle point VI: partial gradients have dimensions (%d, %d), "
          "expected (%d, %d)",
          gx->size(), gy->size(), mx, ny));
    }
    Vector out(mx + ny);
    out.head(mx) = *gx;
    out.tail(ny) = -*gy;
    return out;
  };
  problem.g.prox = [p1 = g1.prox, p2 = g2.prox, mx, ny](
                       const Vector& z,
                       double lambda) -> absl::StatusOr<Vector> {
    absl::StatusOr<Vector> px = p1(z.head(mx), lambda);
    if (!px.ok()) return px.status();
    absl::StatusOr<Vector> py = p2(z.tail(ny), lambda);
    if (!py.ok()) return py.status();
    if (px->size() != mx || py->size() != ny) {
      return absl::InternalError("saddle point VI: block prox changed size");
    }
    Vector out(mx + ny);
    out.head(mx) = *px;
    out.tail(ny) = *py;
    return out;
  };
  if (g1.value && g2.value) {
    problem.g.value = [v1 = g1.value, v2 = g2.value, mx, ny](const Vector& z) {
      return v1(z.head(mx)) + v2(z.tail(ny));
    };
  }
  return problem;
}

absl::StatusOr<VIProblem> BilinearSaddleProblem(const Matrix& b,
                                                double weight_x,
                                                double weight_y) {
  absl::StatusOr<ProxFunction> g1 = MakeProxFunction(L1Norm{weight_x});
  if (!g1.ok()) return g1.status();
  absl::StatusOr<ProxFunction> g2 = MakeProxFunction(L1Norm{weight_y});
  if (!g2.ok()) return g2.status();
  auto shared = std::make_shared<const Matrix>(b);
  const int mx = static_cast<int>(b.cols());
  const int ny = static_cast<int>(b.rows());
  absl::StatusOr<VIProblem> problem = BuildSaddlePointVI(
      [shared](const Vector&, const Vector& y) -> absl::StatusOr<Vector> {
        return shared->transpose() * y;
      },
      [shared](const Vector& x, const Vector&) -> absl::StatusOr<Vector> {
        return *shared * x;
      },
      *std::move(g1), *std::move(g2), mx, ny);
  if (!problem.ok()) return problem;
  absl::StatusOr<double> norm = SpectralNorm(b);
  if (!norm.ok()) return norm.status();
  problem->op.lipschitz = *norm;
  return problem;
}

absl::StatusOr<VIProblem> GenerateBilinearSaddle(int mx, int ny, uint64_t seed,
                                                 double weight) {
  if (mx < 1 || ny < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "bilinear saddle needs block sizes >= 1, got %d and %d", mx, ny));
  }
  std::mt19937_64 rng(seed);
  Matrix b(ny, mx);
  for (int i = 0; i < ny; ++i) {
    for (int j = 0; j < mx; ++j) b(i, j) = UniformSymmetric(rng);
  }
  return BilinearSaddleProblem(b, weight, weight);
}

}  // namespace grvi
