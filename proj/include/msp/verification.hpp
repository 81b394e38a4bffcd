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

#include "msp/kernel.hpp"
#include "msp/oracle.hpp"
#include "msp/synthesis.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace msp {

struct VerificationOptions {
  double alpha_relative = 1e-9;       // |alpha_ip| < alpha_relative * gbar_i * tau
  double chi_absolute = 1e-6;         // targets and untargeted entries, rad
  double agreement_relative = 1e-8;   // coefficient vs time domain, relative to max |chi|
  std::vector<double> detuning;       // rad/us; empty skips the scan
  oracle::OracleOptions quadrature;
};

struct VerificationCheck {
  std::string name;
  bool passed = true;
  double value = 0.0;
  double threshold = 0.0;
};

struct DetuningRow {
  double delta = 0.0;  // rad/us
  int mode = 0;
  double alpha_abs = 0.0;  // max over ions and slots
};

struct VerificationReport {
  std::vector<Eigen::MatrixXcd> alpha;  // per slot, ion x mode
  Eigen::MatrixXd ion_gbar;             // ion x slot
  Eigen::VectorXd gate_gbar;            // per gate, own pulse
  Eigen::MatrixXd chi;                  // time domain, summed over slots
  Eigen::MatrixXd chi_coefficient;      // empty when no kernels were supplied
  double max_alpha_ratio = 0.0;         // max |alpha| / (gbar tau)
  double alpha_error = 0.0;
  double chi_error = 0.0;
  double max_asymmetry = 0.0;
  std::vector<DetuningRow> detuning;
  std::vector<VerificationCheck> checks;

  bool passed() const;
};

/// Time-domain waveforms of every ion for one slot.
std::vector<oracle::Waveform> ion_waveforms(const PulseSolution& solution, int slot = 0);

/// Runs the quadrature oracle on every slot of `solution`. `kernels` may be
/// null; when given, the coefficient-space chi is compared as well.
VerificationReport verify(const PulseSolution& solution, const ModeSpectrum& spectrum,
                          const CouplingKernel* kernels = nullptr,
                          const VerificationOptions& options = {});

}  // namespace msp
