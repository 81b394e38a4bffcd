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

#include <complex>
#include <span>
#include <vector>

// Time-domain verification. Nothing in here uses the closed-form moments of
// the basis and kernel modules: every quantity is a quadrature over samples
// of the pulse itself.
namespace msp::oracle {

/// g(t) = sum_k amplitude_k sin(frequency_k t) on [0, tau], in rad/us.
class Waveform {
 public:
  Waveform() = default;
  Waveform(double tau, std::vector<double> frequencies, std::vector<double> amplitudes);

  static Waveform from_coefficients(const BasisSet& basis, const Eigen::VectorXd& coefficients);

  double tau() const { return tau_; }
  double max_frequency() const;
  bool is_zero() const;
  const std::vector<double>& frequencies() const { return frequencies_; }
  const std::vector<double>& amplitudes() const { return amplitudes_; }

  /// Direct evaluation, one std::sin per term.
  double operator()(double t) const;

  /// Batched evaluation; runs of equally spaced frequencies are summed as a
  /// polynomial in e^{i step t} by Horner's rule.
  void sample(std::span<const double> times, std::span<double> out) const;

 private:
  double tau_ = 0.0;
  std::vector<double> frequencies_;
  std::vector<double> amplitudes_;
};

/// Composite Gauss-Legendre rule on `panels` equal panels of [0, tau].
struct QuadratureGrid {
  double tau = 0.0;
  int panels = 0;
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline constexpr int kPanelOrder = 20;

QuadratureGrid make_grid(double tau, int panels, int order = kPanelOrder);

/// Number of panels giving at most `phase_per_panel` radians of the fastest
/// oscillation (frequency `max_frequency`) per panel.
int panels_for(double tau, double max_frequency, double phase_per_panel = 8.0);

struct OracleOptions {
  int max_refinements = 4;
  double alpha_tolerance = 1e-12;  // relative to gbar * tau
  double chi_tolerance = 1e-11;    // rad, absolute
  double phase_per_panel = 8.0;
};

template <typename T>
struct Estimate {
  T value{};
  double error = 0.0;  // |fine - coarse| of the last refinement
  int panels = 0;
};

/// alpha = int_0^tau g(t) e^{-i omega t} dt.
Estimate<std::complex<double>> alpha_residual(const Waveform& g, double omega,
                                              const OracleOptions& options = {});

/// gbar = sqrt((1 / tau) int_0^tau g(t)^2 dt).
double power_metric(const Waveform& g, const OracleOptions& options = {});

/// Ordered theta_ijp = 4 int dt2 int^{t2} dt1 g_i(t1) g_j(t2) sin(omega (t1 - t2)).
Estimate<double> ordered_theta(const Waveform& g_i, const Waveform& g_j, double omega,
                               const OracleOptions& options = {});

struct ChiEstimate {
  Eigen::MatrixXd chi;          // symmetrised (chi_ij + chi_ji) / 2
  Eigen::MatrixXd ordered;      // sum_p eta_ip eta_jp theta_ijp
  double error = 0.0;
  double max_asymmetry = 0.0;   // max |ordered_ij - ordered_ji|
  int panels = 0;
};

/// chi over all ion pairs by nested quadrature: the inner t1 integral is
/// accumulated panel by panel with a spectral integration matrix, the outer
/// t2 integral uses the same Gauss-Legendre nodes.
ChiEstimate chi_matrix(const std::vector<Waveform>& ion_waveforms,
                       const ModeSpectrum& spectrum, const OracleOptions& options = {});

struct TimeDomainAnalysis {
  Eigen::MatrixXcd alpha;     // ion x mode
  Eigen::MatrixXd chi;        // symmetrised
  Eigen::MatrixXd ordered;
  Eigen::VectorXd gbar;       // per ion
  double alpha_error = 0.0;   // max over ions of |d alpha| / (gbar tau)
  double chi_error = 0.0;
  double max_asymmetry = 0.0;
  int panels = 0;
};

/// alpha, chi and gbar for every ion from one set of samples per level.
TimeDomainAnalysis analyze(const std::vector<Waveform>& ion_waveforms,
                           const ModeSpectrum& spectrum, const OracleOptions& options = {});

struct DetuningPoint {
  double delta = 0.0;   // rad/us
  int mode = 0;
  double alpha_abs = 0.0;
};

/// |alpha| at omega + delta for each delta.
std::vector<DetuningPoint> detuning_scan(const Waveform& g, double omega, int mode,
                                         std::span<const double> deltas,
                                         const OracleOptions& options = {});

/// Least-squares slope of log |alpha| against log delta.
double log_log_slope(const std::vector<DetuningPoint>& scan);

}  // namespace msp::oracle
