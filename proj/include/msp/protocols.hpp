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
#include "msp/synthesis.hpp"

#include <Eigen/Dense>

#include <vector>

namespace msp {

/// Sylvester-Walsh signs: rows are pairs, columns are time slots.
struct SignSchedule {
  Eigen::MatrixXi signs;
  double slot_scale = 1.0;  // amplitude factor 1 / sqrt(slots)

  int size() const { return static_cast<int>(signs.rows()); }
};

/// G_1 = [+1], G_2n = [[G_n, G_n], [G_n, -G_n]]. InvalidCount unless count
/// is a power of two.
SignSchedule walsh_signs(int count);

/// Each gate solved alone on its best single candidate with no projector.
std::vector<GateSolution> solve_series_pulses(const GateSpec& spec, const SolverContext& context,
                                              const SynthesisOptions& options = {});

/// Gate m plays in every slot with sign signs(m, k) and amplitude
/// slot_scale, so each slot carries chi / slots and cross terms cancel over
/// the full schedule. InvalidSchedule unless `signs` is square with one row
/// per pulse.
PulseSolution sequencing_schedule(std::vector<GateSolution> series, const SignSchedule& signs,
                                  const BasisSet& basis, int ion_count);

PulseSolution sequencing_synthesize(const GateSpec& spec, const SolverContext& context,
                                    const SynthesisOptions& options = {});

struct FrequencyBand {
  IonPair pair;
  int mode = 0;
  int center = 0;  // basis position nearest the mode frequency
  int first = 0;   // basis positions [first, last)
  int last = 0;
  BasisSet basis;
  NullBasis null;

  std::vector<int> positions() const;
};

struct FrequencyPartition {
  std::vector<FrequencyBand> bands;  // ascending in frequency
};

/// Smallest band the partition will produce: 2 P (K + 1) + 1 members.
int minimum_band_size(int mode_count, int stabilization_order);

/// Contiguous bands, one per assigned gate. Each band is the set of basis
/// frequencies nearer to its gate's mode than to any other gate's mode;
/// bands below the minimum size are grown by moving their boundaries.
FrequencyPartition partition_frequencies(const BasisSet& basis, const Assignment& assignment,
                                         const ModeSpectrum& spectrum);

/// Per gate, the largest-|eigenvalue| direction of the pair kernel within
/// its own band's null space, scaled to the target.
PulseSolution disjoint_synthesize(const GateSpec& spec, const SolverContext& context,
                                  const FrequencyPartition& partition,
                                  const SynthesisOptions& options = {});

/// Assignment as in the common protocol, then partition and solve.
PulseSolution disjoint_synthesize(const GateSpec& spec, const SolverContext& context,
                                  const SynthesisOptions& options = {});

}  // namespace msp
