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

#include "msp/spectrum.hpp"

#include "fixture_tables.hpp"
#include "msp/errors.hpp"
#include "msp/units.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace msp {
namespace {

constexpr int kNewtonIterationCap = 200;
constexpr double kGradientTolerance = 1e-12;

double axial_energy(const Eigen::VectorXd& u) {
  double v = 0.5 * u.squaredNorm();
  for (Eigen::Index i = 0; i < u.size(); ++i)
    for (Eigen::Index j = i + 1; j < u.size(); ++j) v += 1.0 / std::abs(u[i] - u[j]);
  return v;
}

Eigen::VectorXd axial_gradient(const Eigen::VectorXd& u) {
  Eigen::VectorXd g = u;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      if (i == j) continue;
      const double d = u[i] - u[j];
      g[i] -= (d > 0 ? 1.0 : -1.0) / (d * d);
    }
  }
  return g;
}

Eigen::MatrixXd axial_hessian(const Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double c = 2.0 / std::pow(std::abs(u[i] - u[j]), 3);
      h(i, i) += c;
      h(i, j) -= c;
    }
  }
  return h;
}

bool strictly_increasing(const Eigen::VectorXd& u) {
  for (Eigen::Index i = 1; i < u.size(); ++i)
    if (!(u[i] > u[i - 1])) return false;
  return true;
}

// Largest-magnitude component positive; near-ties go to the lowest index.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= peak * (1.0 - 1e-9)) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

TrapModel TrapModel::from_mhz(int ion_count, double axial_mhz,
                              double transverse_mhz, double lamb_dicke_scale) {
  TrapModel m;
  m.ion_count = ion_count;
  m.axial_frequency = mhz_to_angular(axial_mhz);
  m.transverse_frequency = mhz_to_angular(transverse_mhz);
  m.lamb_dicke_scale = lamb_dicke_scale;
  return m;
}

void TrapModel::validate() const {
  if (ion_count < 1) fail(ErrorKind::kInvalidInput, "ion_count must be >= 1");
  if (!(axial_frequency > 0.0))
    fail(ErrorKind::kInvalidInput, "axial frequency must be positive");
  if (!(transverse_frequency > axial_frequency))
    fail(ErrorKind::kInvalidInput,
         "transverse frequency must exceed the axial frequency");
  if (!(lamb_dicke_scale > 0.0))
    fail(ErrorKind::kInvalidInput, "Lamb-Dicke scale must be positive");
}

void ModeSpectrum::validate() const {
  if (mode_frequencies.size() == 0)
    fail(ErrorKind::kInvalidInput, "spectrum has no modes");
  if (lamb_dicke.cols() != mode_frequencies.size())
    fail(ErrorKind::kInvalidInput, "Lamb-Dicke matrix column count != mode count");
  if (lamb_dicke.rows() == 0)
    fail(ErrorKind::kInvalidInput, "spectrum has no ions");
  for (Eigen::Index p = 0; p < mode_frequencies.size(); ++p) {
    if (!(mode_frequencies[p] > 0.0) || !std::isfinite(mode_frequencies[p]))
      fail(ErrorKind::kInvalidInput, "mode frequencies must be positive");
    if (p > 0 && mode_frequencies[p] < mode_frequencies[p - 1])
      fail(ErrorKind::kInvalidInput, "mode frequencies must be ascending");
  }
  if (!lamb_dicke.allFinite())
    fail(ErrorKind::kInvalidInput, "Lamb-Dicke matrix has non-finite entries");
}

std::vector<double> solve_equilibrium(const TrapModel& model) {
  if (model.ion_count < 1) fail(ErrorKind::kInvalidInput, "ion_count must be >= 1");
  const int n = model.ion_count;
  if (n == 1) return {0.0};

  // Minimum spacing of a harmonic Coulomb chain is roughly 2 N^-0.56.
  const double spacing = 2.0 * std::pow(static_cast<double>(n), -0.56);
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u[i] = (i - 0.5 * (n - 1)) * spacing;

  // V is convex on the ordered region, so backtracking on energy is enough.
  double energy = axial_energy(u);
  for (int iter = 0; iter < kNewtonIterationCap; ++iter) {
    const Eigen::VectorXd g = axial_gradient(u);
    if (g.cwiseAbs().maxCoeff() < kGradientTolerance) break;
    const Eigen::VectorXd step = axial_hessian(u).ldlt().solve(-g);
    double t = 1.0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      const Eigen::VectorXd trial = u + t * step;
      if (!strictly_increasing(trial)) continue;
      const double e = axial_energy(trial);
      if (e <= energy + 1e-14 * std::abs(energy)) {
        u = trial;
        energy = e;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  // Exact mirror symmetry; averaging cannot move the residual off its floor.
  Eigen::VectorXd sym(n);
  for (int i = 0; i < n; ++i) sym[i] = 0.5 * (u[i] - u[n - 1 - i]);
  if (axial_gradient(sym).cwiseAbs().maxCoeff() <=
      axial_gradient(u).cwiseAbs().maxCoeff())
    u = sym;

  const double residual = axial_gradient(u).cwiseAbs().maxCoeff();
  if (!(residual < kGradientTolerance))
    fail(ErrorKind::kNumericalFailure,
         "equilibrium solve did not converge (|grad| = " +
             std::to_string(residual) + ")");
  return {u.data(), u.data() + n};
}

double equilibrium_residual(const std::vector<double>& positions) {
  const Eigen::Map<const Eigen::VectorXd> u(positions.data(),
                                            static_cast<Eigen::Index>(positions.size()));
  return axial_gradient(u).cwiseAbs().maxCoeff();
}

ModeSpectrum compute_modes(const TrapModel& model) {
  model.validate();
  const int n = model.ion_count;
  const std::vector<double> positions = solve_equilibrium(model);

  // Transverse Hessian in units of m * omega_z^2.
  const double beta2 = std::pow(model.transverse_frequency / model.axial_frequency, 2);
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(n, n) * beta2;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double c = 1.0 / std::pow(std::abs(positions[i] - positions[j]), 3);
      k(i, i) -= c;
      k(i, j) += c;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
  if (eig.info() != Eigen::Success)
    fail(ErrorKind::kNumericalFailure, "transverse Hessian diagonalisation failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  if (lambda[0] <= 0.0)
    fail(ErrorKind::kUnstableChain,
         "transverse Hessian has a non-positive eigenvalue; the linear chain "
         "is unstable against a zigzag transition");

  ModeSpectrum s;
  s.source = SpectrumSource::kComputed;
  s.mode_frequencies.resize(n);
  Eigen::MatrixXd b = eig.eigenvectors();
  for (int p = 0; p < n; ++p) {
    s.mode_frequencies[p] = model.axial_frequency * std::sqrt(lambda[p]);
    fix_sign(b.col(p));
  }
  // The uniform vector is an exact eigenvector with eigenvalue beta^2 and
  // bounds the spectrum from above.
  s.mode_frequencies[n - 1] = model.transverse_frequency;

  const double com = model.transverse_frequency;
  s.lamb_dicke.resize(n, n);
  for (int p = 0; p < n; ++p)
    s.lamb_dicke.col(p) =
        b.col(p) * model.lamb_dicke_scale * std::sqrt(com / s.mode_frequencies[p]);

  std::ostringstream prov;
  prov.precision(15);
  prov << "computed: n_ions=" << n
       << " axial_mhz=" << angular_to_mhz(model.axial_frequency)
       << " transverse_mhz=" << angular_to_mhz(model.transverse_frequency)
       << " eta_scale=" << model.lamb_dicke_scale;
  s.provenance = prov.str();
  return s;
}

std::vector<int> fixture_sizes() {
  std::vector<int> sizes;
  for (const auto& t : detail::fixture_tables()) sizes.push_back(t.ion_count);
  return sizes;
}

ModeSpectrum load_fixture(int ion_count) {
  const auto& tables = detail::fixture_tables();
  const auto it = std::find_if(tables.begin(), tables.end(), [&](const auto& t) {
    return t.ion_count == ion_count;
  });
  if (it == tables.end())
    fail(ErrorKind::kUnsupportedFixture,
         "no tabulated spectrum for " + std::to_string(ion_count) +
             " ions (available: 7, 9, 11, 13)");

  const auto freq_rows = parse_csv(it->mode_frequencies_csv);
  const auto eta_rows = parse_csv(it->lamb_dicke_csv);
  const int n = ion_count;
  if (static_cast<int>(freq_rows.size()) != n + 1 ||
      static_cast<int>(eta_rows.size()) != n + 1)
    fail(ErrorKind::kNumericalFailure, "malformed fixture table");

  ModeSpectrum s;
  s.source = SpectrumSource::kFixture;
  s.mode_frequencies.resize(n);
  s.lamb_dicke.resize(n, n);
  for (int p = 0; p < n; ++p)
    s.mode_frequencies[p] = mhz_to_angular(std::stod(freq_rows[p + 1].at(1)));
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(eta_rows[i + 1].size()) != n + 1)
      fail(ErrorKind::kNumericalFailure, "malformed Lamb-Dicke fixture row");
    for (int p = 0; p < n; ++p) s.lamb_dicke(i, p) = std::stod(eta_rows[i + 1][p + 1]);
  }
  s.provenance = "fixture: " + std::string(it->mode_frequencies_path) + ", " +
                 std::string(it->lamb_dicke_path);
  return s;
}

Eigen::MatrixXd mode_vectors(const ModeSpectrum& spectrum) {
  const int n = spectrum.ion_count();
  const int com = spectrum.mode_count() - 1;
  const double eta_com = spectrum.lamb_dicke(0, com);
  const double omega_com = spectrum.mode_frequencies[com];
  Eigen::MatrixXd b(n, spectrum.mode_count());
  for (int p = 0; p < spectrum.mode_count(); ++p)
    b.col(p) = spectrum.lamb_dicke.col(p) /
               (eta_com * std::sqrt(static_cast<double>(n))) *
               std::sqrt(spectrum.mode_frequencies[p] / omega_com);
  return b;
}

}  // namespace msp
