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
#include "msp/kernel.hpp"
#include "msp/spectrum.hpp"

#include <Eigen/Dense>

#include <vector>

namespace msp {

/// Unordered ion pair, stored with first < second.
struct IonPair {
  int first = 0;
  int second = 0;

  static IonPair canonical(int a, int b);
  auto operator<=>(const IonPair&) const = default;
};

/// One (mode, eigen-rank) slot a gate can be assigned to.
struct Candidate {
  int mode = 0;
  int eigen_index = 1;  // lambda, 1-based
  double eigenvalue = 0.0;
  Eigen::VectorXd vector;  // unit norm, null-basis coordinates
};

/// R_p = A^T S_p A.
std::vector<Eigen::MatrixXd> reduced_kernels(const NullBasis& null, const CouplingKernel& kernels);

/// nu = ceil(C(n, 2) / P).
int candidate_depth(int touched_ions, int mode_count);

/// nu eigenpairs per mode by descending |Lambda|, ordered (mode, lambda).
/// Eigenvectors have their largest-magnitude entry positive.
std::vector<Candidate> rank_candidates(const std::vector<Eigen::MatrixXd>& reduced, int nu);

struct Matching {
  std::vector<int> column_of_row;
  double weight = 0.0;
};

/// Exact maximum-weight matching of every row to a distinct column
/// (rows <= cols). Among optimal matchings the one whose column sequence is
/// lexicographically smallest in row order is returned.
Matching max_weight_matching(const Eigen::MatrixXd& weights);

struct AssignmentEntry {
  IonPair pair;
  int candidate = 0;  // index into the candidate list
  int mode = 0;
  int eigen_index = 1;
  double eigenvalue = 0.0;
  double weight = 0.0;  // |eta_ip eta_jp Lambda|
};

struct Assignment {
  std::vector<AssignmentEntry> entries;  // sorted by pair
  std::vector<int> solve_order;          // ascending weight, ties by pair
  double total_weight = 0.0;
  int depth = 0;                         // nu
};

/// Weights |eta_ip eta_jp Lambda_{p, lambda}| over all candidates; pairs are
/// canonicalised and sorted first, so input order does not matter.
Assignment assign_gates(const std::vector<IonPair>& pairs, const std::vector<Candidate>& candidates,
                        const ModeSpectrum& spectrum);

}  // namespace msp
