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

#include "msp/protocols.hpp"

#include "msp/errors.hpp"
#include "ranked_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace msp {
namespace {

std::string pair_label(IonPair p) {
  return "(" + std::to_string(p.first + 1) + ", " + std::to_string(p.second + 1) + ")";
}

// Basis position whose frequency is nearest to omega (lowest on ties).
int nearest_position(const BasisSet& basis, double omega) {
  int best = 0;
  double best_d = std::abs(basis.frequency(0) - omega);
  for (int k = 1; k < basis.size(); ++k) {
    const double d = std::abs(basis.frequency(k) - omega);
    if (d < best_d) {
      best = k;
      best_d = d;
    }
  }
  return best;
}

}  // namespace

SignSchedule walsh_signs(int count) {
  if (count < 1 || (count & (count - 1)) != 0)
    fail(ErrorKind::kInvalidCount, "Walsh schedules need a power-of-two size, got " +
                                       std::to_string(count));
  Eigen::MatrixXi g = Eigen::MatrixXi::Ones(1, 1);
  while (g.rows() < count) {
    const Eigen::Index h = g.rows();
    Eigen::MatrixXi next(2 * h, 2 * h);
    next << g, g, g, -g;
    g = std::move(next);
  }
  SignSchedule s;
  s.signs = std::move(g);
  s.slot_scale = 1.0 / std::sqrt(static_cast<double>(count));
  return s;
}

std::vector<GateSolution> solve_series_pulses(const GateSpec& spec, const SolverContext& context,
                                              const SynthesisOptions& options) {
  spec.validate(context.spectrum.ion_count());
  std::vector<GateSolution> out;
  if (spec.gates.empty()) return out;
  const auto candidates = rank_candidates(context.reduced, 1);
  const Projector identity{Eigen::MatrixXd(context.null.dimension(), 0), 0};
  for (std::size_t m = 0; m < spec.gates.size(); ++m) {
    const IonPair pair = spec.ion_pair(m);
    const Assignment a = assign_gates({pair}, candidates, context.spectrum);
    const AssignmentEntry& e = a.entries.front();
    GateSolution g =
        solve_gate(pair, e.mode, e.eigen_index, identity, context, spec.gates[m].chi, options);
    g.weight = e.weight;
    g.iteration = static_cast<int>(m);
    out.push_back(std::move(g));
  }
  return out;
}

PulseSolution sequencing_schedule(std::vector<GateSolution> series, const SignSchedule& signs,
                                  const BasisSet& basis, int ion_count) {
  if (signs.size() != static_cast<int>(series.size()) || signs.signs.cols() != signs.size())
    fail(ErrorKind::kInvalidSchedule, std::to_string(series.size()) + " pulses but " +
                                          std::to_string(signs.size()) + " sign rows");
  PulseSolution s;
  s.protocol = "sequencing";
  s.basis = basis;
  s.ion_count = ion_count;
  s.slot_scale = signs.slot_scale;
  for (std::size_t m = 0; m < series.size(); ++m) {
    if (series[m].coefficients.size() != basis.size())
      fail(ErrorKind::kInvalidSchedule, "series pulse does not match the basis");
    std::vector<int> row(static_cast<std::size_t>(signs.signs.cols()));
    for (Eigen::Index k = 0; k < signs.signs.cols(); ++k)
      row[k] = signs.signs(static_cast<Eigen::Index>(m), k);
    s.slot_signs.push_back(std::move(row));
  }
  s.gates = std::move(series);
  return s;
}

PulseSolution sequencing_synthesize(const GateSpec& spec, const SolverContext& context,
                                    const SynthesisOptions& options) {
  auto series = solve_series_pulses(spec, context, options);
  if (series.empty()) {
    PulseSolution s;
    s.protocol = "sequencing";
    s.basis = context.basis;
    s.ion_count = context.spectrum.ion_count();
    return s;
  }
  const SignSchedule signs = walsh_signs(static_cast<int>(series.size()));
  return sequencing_schedule(std::move(series), signs, context.basis,
                             context.spectrum.ion_count());
}

std::vector<int> FrequencyBand::positions() const {
  std::vector<int> p(static_cast<std::size_t>(last - first));
  std::iota(p.begin(), p.end(), first);
  return p;
}

int minimum_band_size(int mode_count, int stabilization_order) {
  return 2 * mode_count * (stabilization_order + 1) + 1;
}

FrequencyPartition partition_frequencies(const BasisSet& basis, const Assignment& assignment,
                                         const ModeSpectrum& spectrum) {
  basis.validate();
  FrequencyPartition part;
  const int count = static_cast<int>(assignment.entries.size());
  if (count == 0) return part;
  const int min_size = minimum_band_size(spectrum.mode_count(), basis.stabilization_order);
  const int l = basis.size();
  if (l < count * min_size)
    fail(ErrorKind::kInsufficientDof,
         std::to_string(count) + " bands of at least " + std::to_string(min_size) +
             " frequencies need " + std::to_string(count * min_size) + " basis members, have " +
             std::to_string(l));

  struct Seed {
    int center;
    const AssignmentEntry* entry;
  };
  std::vector<Seed> seeds;
  for (const auto& e : assignment.entries)
    seeds.push_back({nearest_position(basis, spectrum.mode_frequencies[e.mode]), &e});
  std::stable_sort(seeds.begin(), seeds.end(),
                   [](const Seed& a, const Seed& b) { return a.center < b.center; });

  // Boundaries b[0] = 0 < b[1] < ... < b[count] = l; band m is [b[m], b[m+1]).
  std::vector<int> b(static_cast<std::size_t>(count + 1));
  b[0] = 0;
  b[count] = l;
  for (int m = 1; m < count; ++m) b[m] = (seeds[m - 1].center + seeds[m].center + 1) / 2;
  for (int m = 1; m < count; ++m) b[m] = std::max(b[m], b[m - 1] + min_size);
  for (int m = count - 1; m >= 1; --m) b[m] = std::min(b[m], b[m + 1] - min_size);

  for (int m = 0; m < count; ++m) {
    FrequencyBand band;
    band.pair = seeds[m].entry->pair;
    band.mode = seeds[m].entry->mode;
    band.center = seeds[m].center;
    band.first = b[m];
    band.last = b[m + 1];
    band.basis = basis.subset(band.positions());
    try {
      band.null = null_space(build_constraint_matrix(band.basis, spectrum));
    } catch (const Error& err) {
      fail(err.kind(), "band for gate " + pair_label(band.pair) + " (basis indices " +
                           std::to_string(band.basis.indices.front()) + ".." +
                           std::to_string(band.basis.indices.back()) + "): " + err.message());
    }
    part.bands.push_back(std::move(band));
  }
  return part;
}

PulseSolution disjoint_synthesize(const GateSpec& spec, const SolverContext& context,
                                  const FrequencyPartition& partition,
                                  const SynthesisOptions& options) {
  spec.validate(context.spectrum.ion_count());
  PulseSolution s;
  s.protocol = "disjoint";
  s.basis = context.basis;
  s.ion_count = context.spectrum.ion_count();
  if (spec.gates.empty()) return s;

  std::map<IonPair, double> targets;
  for (std::size_t g = 0; g < spec.gates.size(); ++g) targets[spec.ion_pair(g)] = spec.gates[g].chi;
  if (partition.bands.size() != targets.size())
    fail(ErrorKind::kInvalidInput, "partition does not have one band per gate");

  const auto& eta = context.spectrum.lamb_dicke;
  int iteration = 0;
  for (const FrequencyBand& band : partition.bands) {
    const auto it = targets.find(band.pair);
    if (it == targets.end())
      fail(ErrorKind::kInvalidInput, "partition band for unknown gate " + pair_label(band.pair));
    const CouplingKernel local = context.kernels.restrict_to(band.positions());
    const Eigen::MatrixXd& a = band.null.matrix;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(a.cols(), a.cols());
    for (int p = 0; p < local.mode_count(); ++p)
      k += eta(band.pair.first, p) * eta(band.pair.second, p) *
           (a.transpose() * local.per_mode[p] * a);
    k = 0.5 * (k + k.transpose());
    const detail::EigenPair top = detail::ranked_eigenpair(k, 1);
    const Eigen::VectorXd& r = top.vector;
    const double chi_raw = top.value;
    if (!(std::abs(chi_raw) > options.degenerate_threshold * k.cwiseAbs().maxCoeff()))
      fail(ErrorKind::kDegenerateSolution, "gate " + pair_label(band.pair) +
                                               " has no entangling direction in its band");

    GateSolution g;
    g.pair = band.pair;
    g.target = it->second;
    g.mode = band.mode;
    g.eigen_index = 1;
    g.iteration = iteration++;
    g.normalization = chi_raw / g.target;
    g.null_coefficients = r / std::sqrt(std::abs(g.normalization));
    g.coefficients = Eigen::VectorXd::Zero(context.basis.size());
    g.coefficients.segment(band.first, band.last - band.first) = a * g.null_coefficients;
    apply_sign_policy(g, options.sign_policy);
    s.gates.push_back(std::move(g));
  }
  return s;
}

PulseSolution disjoint_synthesize(const GateSpec& spec, const SolverContext& context,
                                  const SynthesisOptions& options) {
  spec.validate(context.spectrum.ion_count());
  if (spec.gates.empty()) return disjoint_synthesize(spec, context, FrequencyPartition{}, options);
  const int nu = candidate_depth(static_cast<int>(spec.touched_ions().size()),
                                 context.spectrum.mode_count());
  const Assignment assignment =
      assign_gates(spec.ion_pairs(), rank_candidates(context.reduced, nu), context.spectrum);
  const FrequencyPartition partition =
      partition_frequencies(context.basis, assignment, context.spectrum);
  PulseSolution s = disjoint_synthesize(spec, context, partition, options);
  s.assignment = assignment;
  return s;
}

}  // namespace msp
