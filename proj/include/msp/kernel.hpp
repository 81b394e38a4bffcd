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

#pragma once

#include "msp/basis.hpp"
#include "msp/spectrum.hpp"

#include <Eigen/Dense>

#include <vector>

namespace msp {

/// theta for g_i = sin(omega_a t) on the earlier time t1 and
/// g_j = sin(omega_b t) on the later time t2:
///   4 int_0^tau dt2 int_0^t2 dt1 sin(omega_a t1) sin(omega_b t2) sin(omega_p (t1 - t2)).
double ordered_coupling(double omega_a, double omega_b, double omega_p, double tau);

/// Symmetrised kernel entry (theta_mnp + theta_nmp) / 2.
double coupling_entry(double omega_m, double omega_n, double omega_p, double tau);

/// Per-mode symmetric L x L matrices S_p; v^T S_p w is the (symmetrised)
/// theta_p for the pulses with sine coefficients v and w.
struct CouplingKernel {
  std::vector<Eigen::MatrixXd> per_mode;

  int mode_count() const { return static_cast<int>(per_mode.size()); }
  Eigen::Index basis_size() const { return per_mode.empty() ? 0 : per_mode[0].rows(); }

  /// sum_p eta_ip eta_jp S_p.
  Eigen::MatrixXd pair_kernel(const ModeSpectrum& spectrum, int i, int j) const;

  /// Restriction to a subset of basis positions.
  CouplingKernel restrict_to(const std::vector<int>& positions) const;
};

CouplingKernel build_kernels(const BasisSet& basis, const ModeSpectrum& spectrum);

/// chi_ij = v_i^T (sum_p eta_ip eta_jp S_p) v_j. Throws InvalidPair for i == j.
double chi_of(const Eigen::VectorXd& v_i, const Eigen::VectorXd& v_j, int i, int j,
              const CouplingKernel& kernels, const ModeSpectrum& spectrum);

/// Full coefficient-space chi matrix for per-ion sine coefficients (rows of
/// `ion_coefficients`, N x L). Diagonal is zero.
Eigen::MatrixXd coefficient_chi_matrix(const Eigen::MatrixXd& ion_coefficients,
                                       const CouplingKernel& kernels,
                                       const ModeSpectrum& spectrum);

}  // namespace msp
