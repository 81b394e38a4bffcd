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

#include "msp/assignment.hpp"
#include "msp/basis.hpp"
#include "msp/kernel.hpp"
#include "msp/spectrum.hpp"

#include <Eigen/Dense>

#include <array>
#include <numbers>
#include <string>
#include <vector>

namespace msp {

struct GateTarget {
  int qubit_a = 0;
  int qubit_b = 0;
  double chi = std::numbers::pi / 2;
};

/// The gate graph over qubits plus the qubit -> ion map. An empty map is the
/// identity.
struct GateSpec {
  std::vector<GateTarget> gates;
  std::vector<int> qubit_to_ion;

  int ion_of(int qubit) const;
  IonPair ion_pair(std::size_t gate) const;
  std::vector<IonPair> ion_pairs() const;
  /// Ions touched by at least one gate, ascending.
  std::vector<int> touched_ions() const;

  void validate(int ion_count) const;

  /// Qubits 0..count-1 on the middle `count` ions of an `ion_count` chain.
  static std::vector<int> middle_ions(int ion_count, int count);
  /// Every pair of `qubits` qubits.
  static GateSpec all_pairs(int qubits, double chi = std::numbers::pi / 2);
};

/// What to do when the projected eigenvector yields a chi of the wrong sign.
enum class SignPolicy {
  kFlipIon,  // negate the second ion's drive for this gate
  kRecord,   // keep the pulse, report achieved_chi = -target
  kStrict,   // SignInfeasible
};

struct SynthesisOptions {
  SignPolicy sign_policy = SignPolicy::kFlipIon;
  double degenerate_threshold = 1e-14;  // |chi_raw| relative to kernel scale
  double skip_threshold = 1e-13;        // crosstalk vector norm relative to its scale
};

struct GateSolution {
  IonPair pair;
  double target = 0.0;
  int mode = -1;          // -1 when no candidate is involved
  int eigen_index = 0;
  double weight = 0.0;
  int iteration = 0;      // position in the solve order

  Eigen::VectorXd coefficients;       // v_m, sine basis
  Eigen::VectorXd null_coefficients;  // v_m = A r_m
  std::array<double, 2> side_scale{1.0, 1.0};

  double normalization = 0.0;  // N_m
  double achieved_chi = 0.0;
  int achieved_sign = 1;
  int projected_directions = 0;
  int skipped_directions = 0;
};

struct PulseSolution {
  std::string protocol = "common";
  BasisSet basis;
  int ion_count = 0;
  Assignment assignment;
  std::vector<GateSolution> gates;  // solve order
  /// Sequencing only: signs[m][k] for gate m in slot k, with every slot
  /// scaled by slot_scale.
  std::vector<std::vector<int>> slot_signs;
  double slot_scale = 1.0;
  std::vector<std::string> notes;

  int slot_count() const { return slot_signs.empty() ? 1 : static_cast<int>(slot_signs[0].size()); }

  /// N x L per-ion coefficients; ion i receives side_scale * v_m from every
  /// incident gate (times the slot sign and scale for sequenced schedules).
  Eigen::MatrixXd ion_coefficients(int slot = 0) const;

  /// Coefficient-space chi, summed over slots.
  Eigen::MatrixXd chi_matrix(const CouplingKernel& kernels, const ModeSpectrum& spectrum) const;

  PulseSolution without_gate(std::size_t m) const;
  PulseSolution with_gate_scaled(std::size_t m, double c) const;
};

/// Precomputed basis, null space, kernels and reduced kernels for one
/// (spectrum, tau, guard, K) setting.
struct SolverContext {
  ModeSpectrum spectrum;
  BasisSet basis;
  NullBasis null;
  CouplingKernel kernels;
  std::vector<Eigen::MatrixXd> reduced;

  static SolverContext build(const ModeSpectrum& spectrum, double tau, double guard_mhz = 0.1,
                             int stabilization_order = 0);

  /// sum_p eta_ap eta_bp R_p.
  Eigen::MatrixXd reduced_pair_kernel(int a, int b) const;
};

struct Projector {
  Eigen::MatrixXd directions;  // orthonormal columns W, Q = I - W W^T
  int skipped = 0;

  Eigen::MatrixXd matrix() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

/// Q for `pair` given the gates already solved.
Projector crosstalk_projector(const std::vector<GateSolution>& previous, IonPair pair,
                              const SolverContext& context,
                              const SynthesisOptions& options = {});

/// Solves one gate on candidate (mode, lambda) under projector Q.
GateSolution solve_gate(IonPair pair, int mode, int eigen_index, const Projector& q,
                        const SolverContext& context, double target,
                        const SynthesisOptions& options = {});

/// Sets achieved_chi / achieved_sign (and side_scale under kFlipIon) from
/// the sign of the gate's normalization.
void apply_sign_policy(GateSolution& gate, SignPolicy policy);

PulseSolution synthesize(const GateSpec& spec, const SolverContext& context,
                         const SynthesisOptions& options = {});

struct RebalanceOptions {
  bool pass_through = false;  // leave unsupported components unchanged
};

/// Star components: center side / sqrt(d), leaf side * sqrt(d).
PulseSolution rebalance_power(const PulseSolution& solution, const RebalanceOptions& options = {});

/// gbar of gate m's own pulse, ||v_m|| / sqrt(2) (full-period sine basis).
double gate_gbar(const GateSolution& gate);

/// Per-ion amplitude budget sum_m |side| gbar_m over incident gates.
Eigen::VectorXd ion_amplitude_budget(const PulseSolution& solution);

}  // namespace msp
