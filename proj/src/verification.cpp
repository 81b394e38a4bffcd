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

#include "msp/verification.hpp"

#include "msp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace msp {

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::vector<oracle::Waveform> ion_waveforms(const PulseSolution& solution, int slot) {
  const Eigen::MatrixXd c = solution.ion_coefficients(slot);
  std::vector<oracle::Waveform> out;
  out.reserve(static_cast<std::size_t>(c.rows()));
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    out.push_back(oracle::Waveform::from_coefficients(solution.basis, c.row(i).transpose()));
  return out;
}

VerificationReport verify(const PulseSolution& solution, const ModeSpectrum& spectrum,
                          const CouplingKernel* kernels, const VerificationOptions& options) {
  if (solution.ion_count != spectrum.ion_count())
    fail(ErrorKind::kInvalidInput, "solution and spectrum disagree on the ion count");
  const int n = solution.ion_count;
  const int slots = solution.slot_count();
  const double tau = solution.basis.tau;
  VerificationReport r;
  r.chi = Eigen::MatrixXd::Zero(n, n);
  r.ion_gbar = Eigen::MatrixXd::Zero(n, slots);
  std::vector<std::vector<oracle::Waveform>> waves;
  for (int k = 0; k < slots; ++k) {
    if (solution.gates.empty()) {
      r.alpha.push_back(Eigen::MatrixXcd::Zero(n, spectrum.mode_count()));
      continue;
    }
    waves.push_back(ion_waveforms(solution, k));
    const oracle::TimeDomainAnalysis a = oracle::analyze(waves.back(), spectrum, options.quadrature);
    r.alpha.push_back(a.alpha);
    r.ion_gbar.col(k) = a.gbar;
    r.chi += a.chi;
    r.alpha_error = std::max(r.alpha_error, a.alpha_error);
    r.chi_error += a.chi_error;
    r.max_asymmetry = std::max(r.max_asymmetry, a.max_asymmetry);
    for (int i = 0; i < n; ++i)
      if (a.gbar[i] > 0.0)
        r.max_alpha_ratio =
            std::max(r.max_alpha_ratio, a.alpha.row(i).cwiseAbs().maxCoeff() / (a.gbar[i] * tau));
  }
  r.gate_gbar = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(solution.gates.size()));
  for (std::size_t m = 0; m < solution.gates.size(); ++m)
    r.gate_gbar[static_cast<Eigen::Index>(m)] = oracle::power_metric(
        oracle::Waveform::from_coefficients(solution.basis, solution.gates[m].coefficients),
        options.quadrature);

  r.checks.push_back({"alpha_closure", r.max_alpha_ratio < options.alpha_relative,
                      r.max_alpha_ratio, options.alpha_relative});

  std::set<std::pair<int, int>> targeted;
  double target_dev = 0.0;
  for (const auto& g : solution.gates) {
    targeted.insert({g.pair.first, g.pair.second});
    target_dev = std::max(target_dev, std::abs(r.chi(g.pair.first, g.pair.second) - g.achieved_chi));
  }
  r.checks.push_back({"chi_targets", target_dev < options.chi_absolute, target_dev,
                      options.chi_absolute});
  double stray = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!targeted.count({i, j})) stray = std::max(stray, std::abs(r.chi(i, j)));
  r.checks.push_back({"chi_untargeted", stray < options.chi_absolute, stray, options.chi_absolute});

  if (kernels != nullptr) {
    r.chi_coefficient = solution.chi_matrix(*kernels, spectrum);
    const double scale = std::max(r.chi.cwiseAbs().maxCoeff(), 1e-300);
    const double rel = n > 0 ? (r.chi_coefficient - r.chi).cwiseAbs().maxCoeff() / scale : 0.0;
    r.checks.push_back({"coefficient_agreement", rel < options.agreement_relative, rel,
                        options.agreement_relative});
  }

  if (!options.detuning.empty() && !waves.empty()) {
    for (int p = 0; p < spectrum.mode_count(); ++p) {
      std::vector<DetuningRow> rows;
      for (double d : options.detuning) rows.push_back({d, p, 0.0});
      for (const auto& slot : waves)
        for (const auto& w : slot) {
          if (w.is_zero()) continue;
          const auto scan = oracle::detuning_scan(w, spectrum.mode_frequencies[p], p,
                                                  options.detuning, options.quadrature);
          for (std::size_t k = 0; k < scan.size(); ++k)
            rows[k].alpha_abs = std::max(rows[k].alpha_abs, scan[k].alpha_abs);
        }
      r.detuning.insert(r.detuning.end(), rows.begin(), rows.end());
    }
  }
  return r;
}

}  // namespace msp
