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

#include <Eigen/Dense>

#include <vector>

namespace msp::detail {

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;  // unit norm, largest-magnitude entry positive
};

/// The `count` eigenpairs of the symmetric matrix `a` with the largest
/// |eigenvalue|, in that order (ties keep ascending eigenvalue order).
std::vector<EigenPair> ranked_eigenpairs(const Eigen::MatrixXd& a, int count);

/// Only the `rank`-th (1-based) of the above.
EigenPair ranked_eigenpair(const Eigen::MatrixXd& a, int rank);

}  // namespace msp::detail
