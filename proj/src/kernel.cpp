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

#include "msp/kernel.hpp"

#include "exp_moments.hpp"
#include "msp/errors.hpp"

#include <array>
#include <cmath>

namespace msp {
namespace {

using detail::cplx;

// Expanding the three sines into exponentials, the four conjugate pairs of
// terms collapse to
//   theta = -sum_{s1, s2 = +-1} s1 s2 Im D(s1 a + w, s2 b - w).
double ordered_coupling_from_tables(double a, double b, double w, double tau,
                                    const std::array<cplx, 4>& j0_ab,
                                    const std::array<cplx, 2>& j0_bw) {
  double theta = 0.0;
  for (int s1i = 0; s1i < 2; ++s1i) {
    const double s1 = s1i == 0 ? 1.0 : -1.0;
    for (int s2i = 0; s2i < 2; ++s2i) {
      const double s2 = s2i == 0 ? 1.0 : -1.0;
      const double x = s1 * a + w;
      const double y = s2 * b - w;
      const cplx d = detail::ordered_exp_integral(x, y, tau, j0_ab[2 * s1i + s2i], j0_bw[s2i]);
      theta -= s1 * s2 * d.imag();
    }
  }
  return theta;
}

}  // namespace

double ordered_coupling(double omega_a, double omega_b, double omega_p, double tau) {
  std::array<cplx, 4> j0_ab{};
  std::array<cplx, 2> j0_bw{};
  for (int s1i = 0; s1i < 2; ++s1i)
    for (int s2i = 0; s2i < 2; ++s2i)
      j0_ab[2 * s1i + s2i] = detail::exp_moment0(
          (s1i == 0 ? omega_a : -omega_a) + (s2i == 0 ? omega_b : -omega_b), tau);
  j0_bw[0] = detail::exp_moment0(omega_b - omega_p, tau);
  j0_bw[1] = detail::exp_moment0(-omega_b - omega_p, tau);
  return ordered_coupling_from_tables(omega_a, omega_b, omega_p, tau, j0_ab, j0_bw);
}

double coupling_entry(double omega_m, double omega_n, double omega_p, double tau) {
  return 0.5 * (ordered_coupling(omega_m, omega_n, omega_p, tau) +
                ordered_coupling(omega_n, omega_m, omega_p, tau));
}

Eigen::MatrixXd CouplingKernel::pair_kernel(const ModeSpectrum& spectrum, int i,
                                            int j) const {
  const Eigen::Index l = basis_size();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(l, l);
  for (int p = 0; p < mode_count(); ++p)
    k += spectrum.lamb_dicke(i, p) * spectrum.lamb_dicke(j, p) * per_mode[p];
  return k;
}

CouplingKernel CouplingKernel::restrict_to(const std::vector<int>& positions) const {
  CouplingKernel out;
  const auto n = static_cast<Eigen::Index>(positions.size());
  for (const auto& s : per_mode) {
    Eigen::MatrixXd r(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) r(a, b) = s(positions[a], positions[b]);
    out.per_mode.push_back(std::move(r));
  }
  return out;
}

CouplingKernel build_kernels(const BasisSet& basis, const ModeSpectrum& spectrum) {
  basis.validate();
  spectrum.validate();
  const int l = basis.size();
  const int modes = spectrum.mode_count();
  const double tau = basis.tau;
  const Eigen::VectorXd w = basis.frequencies();

  // J_0(s2 omega_n - omega_p), indexed [s2][n * P + p].
  std::array<std::vector<cplx>, 2> j0_bw;
  for (int s2i = 0; s2i < 2; ++s2i) {
    j0_bw[s2i].resize(static_cast<std::size_t>(l) * modes);
    const double s2 = s2i == 0 ? 1.0 : -1.0;
    for (int n = 0; n < l; ++n)
      for (int p = 0; p < modes; ++p)
        j0_bw[s2i][static_cast<std::size_t>(n) * modes + p] =
            detail::exp_moment0(s2 * w[n] - spectrum.mode_frequencies[p], tau);
  }

  std::vector<Eigen::MatrixXd> ordered(static_cast<std::size_t>(modes),
                                       Eigen::MatrixXd(l, l));
  for (int m = 0; m < l; ++m) {
    for (int n = 0; n < l; ++n) {
      std::array<cplx, 4> j0_ab{};
      j0_ab[0] = detail::exp_moment0(w[m] + w[n], tau);
      j0_ab[1] = detail::exp_moment0(w[m] - w[n], tau);
      j0_ab[2] = detail::exp_moment0(-w[m] + w[n], tau);
      j0_ab[3] = detail::exp_moment0(-w[m] - w[n], tau);
      for (int p = 0; p < modes; ++p) {
        const std::size_t idx = static_cast<std::size_t>(n) * modes + p;
        const std::array<cplx, 2> j0_y{j0_bw[0][idx], j0_bw[1][idx]};
        ordered[p](m, n) = ordered_coupling_from_tables(
            w[m], w[n], spectrum.mode_frequencies[p], tau, j0_ab, j0_y);
      }
    }
  }

  CouplingKernel k;
  k.per_mode.reserve(ordered.size());
  for (auto& theta : ordered) {
    Eigen::MatrixXd s = 0.5 * (theta + theta.transpose());
    if (!s.allFinite()) fail(ErrorKind::kNumericalFailure, "coupling kernel is not finite");
    k.per_mode.push_back(std::move(s));
  }
  return k;
}

double chi_of(const Eigen::VectorXd& v_i, const Eigen::VectorXd& v_j, int i, int j,
              const CouplingKernel& kernels, const ModeSpectrum& spectrum) {
  if (i == j) fail(ErrorKind::kInvalidPair, "chi is undefined for i == j");
  if (i < 0 || j < 0 || i >= spectrum.ion_count() || j >= spectrum.ion_count())
    fail(ErrorKind::kInvalidPair, "ion index out of range");
  double chi = 0.0;
  for (int p = 0; p < kernels.mode_count(); ++p)
    chi += spectrum.lamb_dicke(i, p) * spectrum.lamb_dicke(j, p) *
           v_i.dot(kernels.per_mode[p] * v_j);
  return chi;
}

Eigen::MatrixXd coefficient_chi_matrix(const Eigen::MatrixXd& ion_coefficients,
                                       const CouplingKernel& kernels,
                                       const ModeSpectrum& spectrum) {
  const Eigen::Index n = ion_coefficients.rows();
  Eigen::MatrixXd chi = Eigen::MatrixXd::Zero(n, n);
  for (int p = 0; p < kernels.mode_count(); ++p) {
    const Eigen::MatrixXd theta =
        ion_coefficients * kernels.per_mode[p] * ion_coefficients.transpose();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j)
          chi(i, j) += spectrum.lamb_dicke(i, p) * spectrum.lamb_dicke(j, p) * theta(i, j);
  }
  return chi;
}

}  // namespace msp
