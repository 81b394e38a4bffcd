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

#include "msp/synthesis.hpp"

#include <optional>
#include <vector>

namespace msp {

/// theta is the ratio of desired to obtained angle on edge (a, b).
struct CalibrationEdge {
  int a = 0;
  int b = 0;
  double theta = 1.0;
};

struct CalibrationProblem {
  int qubit_count = 0;
  std::vector<CalibrationEdge> edges;

  /// Throws InvalidInput for theta <= 0, self-loops, repeated edges or
  /// qubits out of range.
  void validate() const;
};

struct CycleCertificate {
  std::vector<int> cycle;     // qubits in order; the last connects back to the first
  double defect_ratio = 1.0;  // >= 1; 1 means the cycle condition holds
};

struct CalibrationResult {
  bool feasible = true;
  std::vector<double> knobs;  // Omega_i, one per qubit, when feasible
  std::optional<CycleCertificate> violation;
};

inline constexpr double kCalibrationTolerance = 1e-9;

/// Per-qubit knobs with Omega_a Omega_b = theta_ab on every edge. Solved in
/// log space component by component; each component's first qubit is the
/// gauge (Omega = 1) unless an odd cycle pins it.
CalibrationResult qubit_level_feasibility(const CalibrationProblem& problem,
                                          double tolerance = kCalibrationTolerance);

/// sqrt(theta_m) per gate.
std::vector<double> gate_scales(const std::vector<double>& measured);

/// Scales gate m (solve order) by sqrt(theta_m).
PulseSolution gate_level_scaling(const PulseSolution& solution,
                                 const std::vector<double>& measured);

}  // namespace msp
