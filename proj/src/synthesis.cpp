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

#include "msp/synthesis.hpp"

#include "msp/errors.hpp"
#include "ranked_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>

namespace msp {
namespace {

std::string pair_label(IonPair p) {
  return "(" + std::to_string(p.first + 1) + ", " + std::to_string(p.second + 1) + ")";
}

int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}

}  // namespace

int GateSpec::ion_of(int qubit) const {
  if (qubit_to_ion.empty()) return qubit;
  if (qubit < 0 || qubit >= static_cast<int>(qubit_to_ion.size()))
    fail(ErrorKind::kInvalidPair, "qubit " + std::to_string(qubit) + " has no ion");
  return qubit_to_ion[qubit];
}

IonPair GateSpec::ion_pair(std::size_t gate) const {
  const GateTarget& g = gates.at(gate);
  return IonPair::canonical(ion_of(g.qubit_a), ion_of(g.qubit_b));
}

std::vector<IonPair> GateSpec::ion_pairs() const {
  std::vector<IonPair> out;
  for (std::size_t g = 0; g < gates.size(); ++g) out.push_back(ion_pair(g));
  return out;
}

std::vector<int> GateSpec::touched_ions() const {
  std::set<int> s;
  for (const auto& p : ion_pairs()) {
    s.insert(p.first);
    s.insert(p.second);
  }
  return {s.begin(), s.end()};
}

void GateSpec::validate(int ion_count) const {
  std::set<int> mapped;
  for (int ion : qubit_to_ion) {
    if (ion < 0 || ion >= ion_count)
      fail(ErrorKind::kInvalidPair, "qubit map points outside the chain");
    if (!mapped.insert(ion).second) fail(ErrorKind::kInvalidPair, "two qubits map to one ion");
  }
  std::set<IonPair> seen;
  for (std::size_t g = 0; g < gates.size(); ++g) {
    const IonPair p = ion_pair(g);
    if (p.first < 0 || p.second >= ion_count)
      fail(ErrorKind::kInvalidPair, "gate " + pair_label(p) + " is outside the chain");
    if (!seen.insert(p).second) fail(ErrorKind::kInvalidPair, "duplicate gate " + pair_label(p));
    if (!(std::isfinite(gates[g].chi) && gates[g].chi != 0.0))
      fail(ErrorKind::kInvalidInput, "gate " + pair_label(p) + " needs a nonzero target angle");
  }
}

std::vector<int> GateSpec::middle_ions(int ion_count, int count) {
  if (count < 0 || count > ion_count)
    fail(ErrorKind::kInvalidInput, "cannot place that many qubits on the chain");
  std::vector<int> out(static_cast<std::size_t>(count));
  std::iota(out.begin(), out.end(), (ion_count - count) / 2);
  return out;
}

GateSpec GateSpec::all_pairs(int qubits, double chi) {
  GateSpec s;
  for (int a = 0; a < qubits; ++a)
    for (int b = a + 1; b < qubits; ++b) s.gates.push_back({a, b, chi});
  return s;
}

Eigen::MatrixXd PulseSolution::ion_coefficients(int slot) const {
  if (slot < 0 || slot >= slot_count()) fail(ErrorKind::kInvalidInput, "slot out of range");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(ion_count, basis.size());
  for (std::size_t m = 0; m < gates.size(); ++m) {
    const GateSolution& g = gates[m];
    const double f = slot_signs.empty() ? 1.0 : slot_scale * slot_signs[m][slot];
    c.row(g.pair.first) += f * g.side_scale[0] * g.coefficients.transpose();
    c.row(g.pair.second) += f * g.side_scale[1] * g.coefficients.transpose();
  }
  return c;
}

Eigen::MatrixXd PulseSolution::chi_matrix(const CouplingKernel& kernels,
                                          const ModeSpectrum& spectrum) const {
  Eigen::MatrixXd chi = Eigen::MatrixXd::Zero(ion_count, ion_count);
  if (gates.empty()) return chi;
  for (int k = 0; k < slot_count(); ++k)
    chi += coefficient_chi_matrix(ion_coefficients(k), kernels, spectrum);
  return chi;
}

PulseSolution PulseSolution::without_gate(std::size_t m) const {
  if (m >= gates.size()) fail(ErrorKind::kInvalidInput, "gate index out of range");
  PulseSolution s = *this;
  s.gates.erase(s.gates.begin() + static_cast<std::ptrdiff_t>(m));
  if (!s.slot_signs.empty()) s.slot_signs.erase(s.slot_signs.begin() + static_cast<std::ptrdiff_t>(m));
  return s;
}

PulseSolution PulseSolution::with_gate_scaled(std::size_t m, double c) const {
  if (m >= gates.size()) fail(ErrorKind::kInvalidInput, "gate index out of range");
  PulseSolution s = *this;
  GateSolution& g = s.gates[m];
  g.coefficients *= c;
  g.null_coefficients *= c;
  g.achieved_chi *= c * c;
  return s;
}

SolverContext SolverContext::build(const ModeSpectrum& spectrum, double tau, double guard_mhz,
                                   int stabilization_order) {
  SolverContext c;
  c.spectrum = spectrum;
  c.basis = build_basis(tau, spectrum, guard_mhz, stabilization_order);
  c.null = null_space(build_constraint_matrix(c.basis, spectrum));
  c.kernels = build_kernels(c.basis, spectrum);
  c.reduced = reduced_kernels(c.null, c.kernels);
  return c;
}

Eigen::MatrixXd SolverContext::reduced_pair_kernel(int a, int b) const {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(null.dimension(), null.dimension());
  for (std::size_t p = 0; p < reduced.size(); ++p) {
    const auto pi = static_cast<Eigen::Index>(p);
    k += spectrum.lamb_dicke(a, pi) * spectrum.lamb_dicke(b, pi) * reduced[p];
  }
  return k;
}

Eigen::MatrixXd Projector::matrix() const {
  const Eigen::Index d = directions.rows();
  return Eigen::MatrixXd::Identity(d, d) - directions * directions.transpose();
}

Eigen::VectorXd Projector::apply(const Eigen::VectorXd& x) const {
  if (directions.cols() == 0) return x;
  return x - directions * (directions.transpose() * x);
}

Projector crosstalk_projector(const std::vector<GateSolution>& previous, IonPair pair,
                              const SolverContext& context, const SynthesisOptions& options) {
  const Eigen::Index d = context.null.dimension();
  const int modes = context.spectrum.mode_count();
  const auto& eta = context.spectrum.lamb_dicke;
  std::vector<Eigen::VectorXd> w;
  Projector q;
  for (const GateSolution& g : previous) {
    std::vector<Eigen::VectorXd> rr;
    rr.reserve(static_cast<std::size_t>(modes));
    for (int p = 0; p < modes; ++p) rr.push_back(context.reduced[p] * g.null_coefficients);
    for (int kappa : {pair.first, pair.second}) {
      for (int kappa2 : {g.pair.first, g.pair.second}) {
        if (kappa == kappa2) continue;
        Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
        for (int p = 0; p < modes; ++p) u += eta(kappa, p) * eta(kappa2, p) * rr[p];
        const double scale = u.norm();
        if (scale == 0.0) {
          ++q.skipped;
          continue;
        }
        for (int pass = 0; pass < 2; ++pass)
          for (const auto& e : w) u -= e.dot(u) * e;
        const double n = u.norm();
        if (n < options.skip_threshold * scale) {
          ++q.skipped;
          continue;
        }
        w.push_back(u / n);
      }
    }
  }
  q.directions.resize(d, static_cast<Eigen::Index>(w.size()));
  for (std::size_t k = 0; k < w.size(); ++k) q.directions.col(static_cast<Eigen::Index>(k)) = w[k];
  return q;
}

GateSolution solve_gate(IonPair pair, int mode, int eigen_index, const Projector& q,
                        const SolverContext& context, double target,
                        const SynthesisOptions& options) {
  if (mode < 0 || mode >= context.spectrum.mode_count())
    fail(ErrorKind::kInvalidInput, "mode out of range");
  if (!(std::isfinite(target) && target != 0.0))
    fail(ErrorKind::kInvalidInput, "target angle must be nonzero");
  const Eigen::MatrixXd& r = context.reduced[mode];
  const Eigen::MatrixXd& w = q.directions;
  Eigen::MatrixXd projected;
  if (w.cols() == 0) {
    projected = r;
  } else {
    // (I - W W^T) R (I - W W^T)
    const Eigen::MatrixXd rw = r * w;
    const Eigen::MatrixXd wrw = w.transpose() * rw;
    projected = r - rw * w.transpose() - w * rw.transpose() + w * wrw * w.transpose();
    projected = 0.5 * (projected + projected.transpose());
  }
  const Eigen::Index available = projected.rows() - w.cols();
  if (eigen_index < 1 || eigen_index > available)
    fail(ErrorKind::kInsufficientDof, "projected null space too small for candidate rank " +
                                          std::to_string(eigen_index));
  const Eigen::VectorXd rstar = detail::ranked_eigenpair(projected, eigen_index).vector;
  const Eigen::VectorXd rq = q.apply(rstar);

  const Eigen::MatrixXd k = context.reduced_pair_kernel(pair.first, pair.second);
  const double chi_raw = rq.dot(k * rq);
  const double scale = k.cwiseAbs().maxCoeff();
  if (!(std::abs(chi_raw) > options.degenerate_threshold * scale))
    fail(ErrorKind::kDegenerateSolution,
         "gate " + pair_label(pair) + " has a vanishing entangling angle on mode " +
             std::to_string(mode + 1) + ", rank " + std::to_string(eigen_index));

  GateSolution g;
  g.pair = pair;
  g.target = target;
  g.mode = mode;
  g.eigen_index = eigen_index;
  g.normalization = chi_raw / target;
  g.null_coefficients = rq / std::sqrt(std::abs(g.normalization));
  g.coefficients = context.null.matrix * g.null_coefficients;
  g.projected_directions = static_cast<int>(w.cols());
  g.skipped_directions = q.skipped;
  apply_sign_policy(g, options.sign_policy);
  return g;
}

PulseSolution synthesize(const GateSpec& spec, const SolverContext& context,
                         const SynthesisOptions& options) {
  spec.validate(context.spectrum.ion_count());
  PulseSolution s;
  s.protocol = "common";
  s.basis = context.basis;
  s.ion_count = context.spectrum.ion_count();
  if (spec.gates.empty()) return s;

  std::map<IonPair, double> targets;
  for (std::size_t g = 0; g < spec.gates.size(); ++g) targets[spec.ion_pair(g)] = spec.gates[g].chi;

  const int nu = candidate_depth(static_cast<int>(spec.touched_ions().size()),
                                 context.spectrum.mode_count());
  const auto candidates = rank_candidates(context.reduced, nu);
  s.assignment = assign_gates(spec.ion_pairs(), candidates, context.spectrum);

  for (std::size_t it = 0; it < s.assignment.solve_order.size(); ++it) {
    const AssignmentEntry& e = s.assignment.entries[s.assignment.solve_order[it]];
    try {
      const Projector q = crosstalk_projector(s.gates, e.pair, context, options);
      GateSolution g = solve_gate(e.pair, e.mode, e.eigen_index, q, context, targets.at(e.pair),
                                  options);
      g.weight = e.weight;
      g.iteration = static_cast<int>(it);
      if (g.skipped_directions > 0)
        s.notes.push_back("gate " + pair_label(e.pair) + ": skipped " +
                          std::to_string(g.skipped_directions) + " degenerate crosstalk directions");
      s.gates.push_back(std::move(g));
    } catch (const Error& err) {
      fail(err.kind(), "iteration " + std::to_string(it + 1) + ", gate " + pair_label(e.pair) + ": " +
                           err.message());
    }
  }
  return s;
}

PulseSolution rebalance_power(const PulseSolution& solution, const RebalanceOptions& options) {
  PulseSolution out = solution;
  const int n = solution.ion_count;
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  for (const auto& g : solution.gates) {
    ++degree[g.pair.first];
    ++degree[g.pair.second];
    parent[find_root(parent, g.pair.first)] = find_root(parent, g.pair.second);
  }
  std::map<int, std::vector<std::size_t>> components;
  for (std::size_t m = 0; m < solution.gates.size(); ++m)
    components[find_root(parent, solution.gates[m].pair.first)].push_back(m);

  for (const auto& [root, members] : components) {
    std::vector<int> hubs;
    for (std::size_t m : members)
      for (int ion : {solution.gates[m].pair.first, solution.gates[m].pair.second})
        if (degree[ion] > 1 && std::find(hubs.begin(), hubs.end(), ion) == hubs.end())
          hubs.push_back(ion);
    if (hubs.empty()) continue;
    if (hubs.size() > 1) {
      if (options.pass_through) {
        out.notes.push_back("rebalance: component with ions of degree > 1 at several vertices left unchanged");
        continue;
      }
      fail(ErrorKind::kUnsupportedGraph,
           "power rebalancing needs a star; ions " + std::to_string(hubs[0] + 1) + " and " +
               std::to_string(hubs[1] + 1) + " both have degree > 1");
    }
    const int center = hubs[0];
    const double root_d = std::sqrt(static_cast<double>(degree[center]));
    for (std::size_t m : members) {
      GateSolution& g = out.gates[m];
      const int side = g.pair.first == center ? 0 : 1;
      g.side_scale[side] /= root_d;
      g.side_scale[1 - side] *= root_d;
    }
  }
  return out;
}

void apply_sign_policy(GateSolution& g, SignPolicy policy) {
  g.achieved_chi = g.target;
  g.achieved_sign = 1;
  if (g.normalization >= 0.0) return;
  switch (policy) {
    case SignPolicy::kFlipIon:
      g.side_scale[1] = -g.side_scale[1];
      break;
    case SignPolicy::kRecord:
      g.achieved_chi = -g.target;
      g.achieved_sign = -1;
      break;
    case SignPolicy::kStrict:
      fail(ErrorKind::kSignInfeasible,
           "gate " + pair_label(g.pair) + " can only reach the target with the opposite sign");
  }
}

double gate_gbar(const GateSolution& gate) { return gate.coefficients.norm() / std::sqrt(2.0); }

Eigen::VectorXd ion_amplitude_budget(const PulseSolution& solution) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(solution.ion_count);
  const double f = solution.slot_signs.empty() ? 1.0 : solution.slot_scale;
  for (const auto& g : solution.gates) {
    const double gb = f * gate_gbar(g);
    b[g.pair.first] += std::abs(g.side_scale[0]) * gb;
    b[g.pair.second] += std::abs(g.side_scale[1]) * gb;
  }
  return b;
}

}  // namespace msp
