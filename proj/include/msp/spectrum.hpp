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

#include <string>
#include <vector>

namespace msp {

/// Linear Paul-trap chain described by its bare secular frequencies.
///
/// Frequencies are angular (rad/us). `lamb_dicke_scale` is the Lamb-Dicke
/// parameter of a single ion on the transverse axis, so the COM mode of an
/// N-ion chain couples with lamb_dicke_scale / sqrt(N) to every ion.
struct TrapModel {
  int ion_count = 1;
  double axial_frequency = 0.0;
  double transverse_frequency = 0.0;
  double lamb_dicke_scale = 0.1;

  static TrapModel from_mhz(int ion_count, double axial_mhz,
                            double transverse_mhz, double lamb_dicke_scale);

  void validate() const;
};

enum class SpectrumSource { kComputed, kFixture, kCustom };

struct ModeSpectrum {
  Eigen::VectorXd mode_frequencies;  // ascending, rad/us
  Eigen::MatrixXd lamb_dicke;        // ion x mode
  SpectrumSource source = SpectrumSource::kCustom;
  std::string provenance;

  int ion_count() const { return static_cast<int>(lamb_dicke.rows()); }
  int mode_count() const { return static_cast<int>(mode_frequencies.size()); }
  double min_frequency() const { return mode_frequencies.minCoeff(); }
  double max_frequency() const { return mode_frequencies.maxCoeff(); }

  // Checks shapes and ordering; throws InvalidInput.
  void validate() const;
};

/// Dimensionless equilibrium positions (units of the Coulomb length
/// (e^2 / 4 pi eps0 m omega_z^2)^(1/3)). Damped Newton, gradient tolerance
/// 1e-12, 200 iteration cap.
std::vector<double> solve_equilibrium(const TrapModel& model);

/// Maximum |dV/du_i| of the dimensionless axial potential at `positions`.
double equilibrium_residual(const std::vector<double>& positions);

/// Transverse normal modes of the chain. Mode vectors are normalised with
/// their largest-magnitude component positive; the COM mode is pinned to the
/// bare transverse frequency.
ModeSpectrum compute_modes(const TrapModel& model);

/// Tabulated spectra for 7, 9, 11 and 13 ions (frequencies tabulated in MHz).
ModeSpectrum load_fixture(int ion_count);
std::vector<int> fixture_sizes();

/// Recovers the orthonormal mode-vector matrix b_ip from eta by removing the
/// per-mode factor eta_COM * sqrt(N) * sqrt(omega_COM / omega_p). The COM
/// mode is the highest-frequency mode.
Eigen::MatrixXd mode_vectors(const ModeSpectrum& spectrum);

}  // namespace msp
