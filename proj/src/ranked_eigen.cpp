// Copyright 2026 The msparallel Authors
//
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

#include "ranked_eigen.hpp"

#include "msp/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace msp::detail {
namespace {

void fix_sign(Eigen::VectorXd& v) {
  Eigen::Index arg = 0;
  for (Eigen::Index k = 1; k < v.size(); ++k)
    if (std::abs(v[k]) > std::abs(v[arg]) * (1.0 + 1e-12)) arg = k;
  if (v[arg] < 0.0) v = -v;
}

// Solves (T - mu) x = b for symmetric tridiagonal T with partial pivoting.
Eigen::VectorXd shifted_solve(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub, double mu,
                              Eigen::VectorXd b) {
  const Eigen::Index n = diag.size();
  Eigen::VectorXd d = diag.array() - mu;
  Eigen::VectorXd up = Eigen::VectorXd::Zero(n);   // first superdiagonal
  Eigen::VectorXd up2 = Eigen::VectorXd::Zero(n);  // second superdiagonal (fill-in)
  Eigen::VectorXd lo = Eigen::VectorXd::Zero(n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    up[k] = sub[k];
    lo[k] = sub[k];
  }
  const double tiny = std::numeric_limits<double>::epsilon() *
                      std::max(1.0, diag.cwiseAbs().maxCoeff() + sub.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (std::abs(lo[k]) > std::abs(d[k])) {
      // Swap rows k and k + 1.
      std::swap(d[k], lo[k]);
      std::swap(up[k], d[k + 1]);
      if (k + 2 < n) std::swap(up2[k], up[k + 1]);
      std::swap(b[k], b[k + 1]);
    }
    if (d[k] == 0.0) d[k] = tiny;
    const double f = lo[k] / d[k];
    d[k + 1] -= f * up[k];
    if (k + 2 < n) up[k + 1] -= f * up2[k];
    b[k + 1] -= f * b[k];
    lo[k] = 0.0;
  }
  if (d[n - 1] == 0.0) d[n - 1] = tiny;
  Eigen::VectorXd x(n);
  for (Eigen::Index k = n; k-- > 0;) {
    double s = b[k];
    if (k + 1 < n) s -= up[k] * x[k + 1];
    if (k + 2 < n) s -= up2[k] * x[k + 2];
    x[k] = s / d[k];
  }
  return x;
}

struct Tridiagonal {
  Eigen::Tridiagonalization<Eigen::MatrixXd> tri;
  Eigen::VectorXd diag, sub, values;
  std::vector<Eigen::Index> order;  // by descending |value|
};

Tridiagonal reduce(const Eigen::MatrixXd& a) {
  Tridiagonal t{Eigen::Tridiagonalization<Eigen::MatrixXd>(a), {}, {}, {}, {}};
  t.diag = t.tri.diagonal();
  t.sub = t.tri.subDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(t.diag, t.sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorKind::kNumericalFailure, "symmetric eigensolver failed");
  t.values = es.eigenvalues();
  t.order.resize(static_cast<std::size_t>(t.values.size()));
  std::iota(t.order.begin(), t.order.end(), 0);
  std::stable_sort(t.order.begin(), t.order.end(), [&](auto x, auto y) {
    return std::abs(t.values[x]) > std::abs(t.values[y]);
  });
  return t;
}

EigenPair extract(const Eigen::MatrixXd& a, const Tridiagonal& t, int rank) {
  const Eigen::Index n = a.rows();
  const double lambda = t.values[t.order[rank - 1]];
  const double norm = std::max(t.diag.cwiseAbs().maxCoeff() + 2.0 * t.sub.cwiseAbs().maxCoeff(),
                               std::numeric_limits<double>::min());
  Eigen::VectorXd x(n);
  for (Eigen::Index k = 0; k < n; ++k) x[k] = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(k));
  x.normalize();
  const double mu = lambda + 64.0 * std::numeric_limits<double>::epsilon() * norm;
  bool converged = false;
  for (int it = 0; it < 8 && !converged; ++it) {
    x = shifted_solve(t.diag, t.sub, mu, x);
    const double nx = x.norm();
    if (!std::isfinite(nx) || nx == 0.0) break;
    x /= nx;
    Eigen::VectorXd tx = t.diag.cwiseProduct(x);
    tx.head(n - 1) += t.sub.cwiseProduct(x.tail(n - 1));
    tx.tail(n - 1) += t.sub.cwiseProduct(x.head(n - 1));
    converged = (tx - lambda * x).norm() <= 1e-12 * norm;
  }
  EigenPair p;
  p.value = lambda;
  if (converged) {
    p.vector = t.tri.matrixQ() * x;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success)
      fail(ErrorKind::kNumericalFailure, "symmetric eigensolver failed");
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto u, auto v) {
      return std::abs(es.eigenvalues()[u]) > std::abs(es.eigenvalues()[v]);
    });
    p.value = es.eigenvalues()[order[rank - 1]];
    p.vector = es.eigenvectors().col(order[rank - 1]);
  }
  p.vector.normalize();
  fix_sign(p.vector);
  return p;
}

}  // namespace

std::vector<EigenPair> ranked_eigenpairs(const Eigen::MatrixXd& a, int count) {
  if (count < 0 || count > a.rows())
    fail(ErrorKind::kInsufficientDof, "not enough eigenpairs available");
  std::vector<EigenPair> out;
  if (count == 0) return out;
  if (!a.allFinite()) fail(ErrorKind::kNumericalFailure, "matrix has non-finite entries");
  const Tridiagonal t = reduce(a);
  for (int r = 1; r <= count; ++r) out.push_back(extract(a, t, r));
  return out;
}

EigenPair ranked_eigenpair(const Eigen::MatrixXd& a, int rank) {
  if (rank < 1 || rank > a.rows())
    fail(ErrorKind::kInsufficientDof, "eigen rank out of range");
  if (!a.allFinite()) fail(ErrorKind::kNumericalFailure, "matrix has non-finite entries");
  return extract(a, reduce(a), rank);
}

}  // namespace msp::detail
