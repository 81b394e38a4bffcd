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

#include "msp/basis.hpp"

#include "exp_moments.hpp"
#include "msp/errors.hpp"
#include "msp/units.hpp"

#include <array>
#include <cmath>
#include <string>

namespace msp {
namespace {

constexpr int kMaxStabilizationOrder = 8;
constexpr double kWindowSlack = 1e-9;

}  // namespace

double BasisSet::frequency(int k) const {
  return kTwoPi * indices.at(static_cast<std::size_t>(k)) / tau;
}

Eigen::VectorXd BasisSet::frequencies() const {
  Eigen::VectorXd w(size());
  for (int k = 0; k < size(); ++k) w[k] = kTwoPi * indices[k] / tau;
  return w;
}

void BasisSet::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau))
    fail(ErrorKind::kInvalidInput, "gate duration must be positive");
  if (stabilization_order < 0 || stabilization_order > kMaxStabilizationOrder)
    fail(ErrorKind::kInvalidInput, "stabilization order must be in [0, 8]");
  if (indices.empty()) fail(ErrorKind::kEmptyBasis, "basis has no members");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 1) fail(ErrorKind::kInvalidInput, "basis indices must be positive");
    if (k > 0 && indices[k] <= indices[k - 1])
      fail(ErrorKind::kInvalidInput, "basis indices must be strictly increasing");
  }
}

BasisSet BasisSet::subset(const std::vector<int>& positions) const {
  BasisSet b;
  b.tau = tau;
  b.stabilization_order = stabilization_order;
  b.indices.reserve(positions.size());
  for (int pos : positions) b.indices.push_back(indices.at(static_cast<std::size_t>(pos)));
  return b;
}

BasisSet build_basis(double tau, const ModeSpectrum& spectrum, double guard_mhz,
                     int stabilization_order) {
  if (!(tau > 0.0)) fail(ErrorKind::kInvalidInput, "gate duration must be positive");
  if (!(guard_mhz >= 0.0)) fail(ErrorKind::kInvalidInput, "guard band must be >= 0");
  spectrum.validate();
  const double f_lo = angular_to_mhz(spectrum.min_frequency()) - guard_mhz;
  const double f_hi = angular_to_mhz(spectrum.max_frequency()) + guard_mhz;
  const long first = std::max(1L, static_cast<long>(std::ceil(f_lo * tau - kWindowSlack)));
  const long last = static_cast<long>(std::floor(f_hi * tau + kWindowSlack));
  if (last < first)
    fail(ErrorKind::kEmptyBasis, "no harmonic of 1/tau lies in the mode window [" +
                                     std::to_string(f_lo) + ", " +
                                     std::to_string(f_hi) + "] MHz");
  BasisSet b;
  b.tau = tau;
  b.stabilization_order = stabilization_order;
  for (long l = first; l <= last; ++l) b.indices.push_back(static_cast<int>(l));
  b.validate();
  return b;
}

std::complex<double> alpha_row(double omega_l, double omega_p, double tau, int k) {
  if (k < 0 || k > kMaxStabilizationOrder)
    fail(ErrorKind::kInvalidInput, "derivative order out of range");
  // sin(a t) e^{i w t} = (e^{i (w + a) t} - e^{i (w - a) t}) / (2 i)
  std::array<detail::cplx, kMaxStabilizationOrder + 1> plus{}, minus{};
  const std::span<detail::cplx> p(plus.data(), static_cast<std::size_t>(k + 1));
  const std::span<detail::cplx> m(minus.data(), static_cast<std::size_t>(k + 1));
  detail::exp_moments(omega_p + omega_l, tau, p);
  detail::exp_moments(omega_p - omega_l, tau, m);
  const detail::cplx i_k = std::pow(detail::cplx{0.0, 1.0}, k);
  return i_k * (plus[k] - minus[k]) / detail::cplx{0.0, 2.0};
}

ConstraintMatrix build_constraint_matrix(const BasisSet& basis,
                                         const ModeSpectrum& spectrum) {
  basis.validate();
  spectrum.validate();
  const int order = basis.stabilization_order;
  const int modes = spectrum.mode_count();
  const int cols = basis.size();
  ConstraintMatrix c;
  c.mode_count = modes;
  c.stabilization_order = order;
  c.rows.resize(2 * modes * (order + 1), cols);

  std::array<detail::cplx, kMaxStabilizationOrder + 1> plus{}, minus{};
  const std::span<detail::cplx> p(plus.data(), static_cast<std::size_t>(order + 1));
  const std::span<detail::cplx> m(minus.data(), static_cast<std::size_t>(order + 1));
  for (int l = 0; l < cols; ++l) {
    const double wl = basis.frequency(l);
    for (int mode = 0; mode < modes; ++mode) {
      const double wp = spectrum.mode_frequencies[mode];
      detail::exp_moments(wp + wl, basis.tau, p);
      detail::exp_moments(wp - wl, basis.tau, m);
      detail::cplx i_k = 1.0;
      double tau_k = 1.0;
      for (int k = 0; k <= order; ++k) {
        const detail::cplx a = i_k * (plus[k] - minus[k]) / detail::cplx{0.0, 2.0};
        const int row = 2 * (k * modes + mode);
        c.rows(row, l) = a.real() / tau_k;
        c.rows(row + 1, l) = a.imag() / tau_k;
        i_k *= detail::cplx{0.0, 1.0};
        tau_k *= basis.tau;
      }
    }
  }
  if (!c.rows.allFinite())
    fail(ErrorKind::kNumericalFailure, "constraint matrix has non-finite entries");
  return c;
}

NullBasis null_space(const ConstraintMatrix& m, double tol) {
  const Eigen::Index rows = m.row_count();
  const Eigen::Index cols = m.col_count();
  if (rows >= cols)
    fail(ErrorKind::kInsufficientDof,
         "constraint matrix has " + std::to_string(rows) + " rows but only " +
             std::to_string(cols) + " basis functions");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.rows, Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success)
    fail(ErrorKind::kNumericalFailure, "SVD of the constraint matrix failed");
  NullBasis n;
  n.singular_values = svd.singularValues();
  const double cutoff = tol * (n.singular_values.size() ? n.singular_values[0] : 0.0);
  n.rank = 0;
  for (Eigen::Index k = 0; k < n.singular_values.size(); ++k)
    if (n.singular_values[k] > cutoff) ++n.rank;
  const Eigen::Index dim = cols - n.rank;
  if (dim <= 0) fail(ErrorKind::kInsufficientDof, "constraint matrix has a trivial null space");
  n.matrix = svd.matrixV().rightCols(dim);
  return n;
}

}  // namespace msp
