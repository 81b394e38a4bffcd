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

#include "msp/spectrum.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace msp {

/// Sine basis sin(2 pi l t / tau) over the gate duration tau (us).
///
/// Every basis function vanishes at t = 0 and t = tau, and any two distinct
/// members are orthogonal on [0, tau].
struct BasisSet {
  double tau = 0.0;
  std::vector<int> indices;      // strictly increasing, positive
  int stabilization_order = 0;   // K

  int size() const { return static_cast<int>(indices.size()); }
  double frequency(int k) const;  // omega_l for the k-th member, rad/us
  Eigen::VectorXd frequencies() const;

  void validate() const;

  // Subset by position within `indices`.
  BasisSet subset(const std::vector<int>& positions) const;
};

/// All l with l / tau inside [f_min - guard, f_max + guard] (MHz), where
/// f_min / f_max are the lowest / highest mode frequencies.
BasisSet build_basis(double tau, const ModeSpectrum& spectrum,
                     double guard_mhz = 0.1, int stabilization_order = 0);

/// d^k/d omega_p^k of int_0^tau sin(omega_l t) e^{i omega_p t} dt, i.e.
/// int_0^tau (i t)^k sin(omega_l t) e^{i omega_p t} dt, in closed form.
std::complex<double> alpha_row(double omega_l, double omega_p, double tau, int k);

/// Real constraint matrix for the displacement-closure conditions.
///
/// Row layout: for derivative order k, mode p, the real and imaginary parts
/// of alpha_row at row 2 (k P + p) and 2 (k P + p) + 1. Rows of order k are
/// divided by tau^k so every block has the same scale; the null space is
/// unchanged.
struct ConstraintMatrix {
  Eigen::MatrixXd rows;
  int mode_count = 0;
  int stabilization_order = 0;

  Eigen::Index row_count() const { return rows.rows(); }
  Eigen::Index col_count() const { return rows.cols(); }
};

ConstraintMatrix build_constraint_matrix(const BasisSet& basis,
                                         const ModeSpectrum& spectrum);

/// Orthonormal basis of ker(M), via SVD.
struct NullBasis {
  Eigen::MatrixXd matrix;  // L x (L - rank)
  int rank = 0;
  Eigen::VectorXd singular_values;

  int dimension() const { return static_cast<int>(matrix.cols()); }
};

inline constexpr double kDefaultRankTolerance = 1e-10;

NullBasis null_space(const ConstraintMatrix& m, double tol = kDefaultRankTolerance);

}  // namespace msp
