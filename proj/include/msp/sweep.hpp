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

#include "msp/config.hpp"
#include "msp/synthesis.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace msp {

/// Seeded gate patterns on an n-ion chain. all_pairs has a single instance;
/// the disjoint patterns return up to `count` distinct random instances.
std::vector<GateSpec> pattern_instances(Pattern pattern, int ion_count, int count,
                                        std::uint64_t seed);

struct IndexRow {
  int gate_rank = 0;  // 1-based position in the solve order
  int ion_i = 0;      // 1-based
  int ion_j = 0;
  int mode_p = 0;     // 1-based
  int lambda = 0;
  double gbar = 0.0;
};

struct SweepPoint {
  int ion_count = 0;
  double tau_us = 0.0;
  Pattern pattern = Pattern::kAllPairs;
  int instances = 0;  // attempted
  int failed = 0;
  std::string reason;  // first failure, empty when every instance solved
  double mean_gbar = 0.0;
  double max_gbar = 0.0;
  int gates = 0;
  std::vector<IndexRow> rows;  // first instance, solve order

  bool ok() const { return failed < instances; }
};

struct SweepResult {
  SweepConfig config;
  std::uint64_t hash = 0;
  std::vector<SweepPoint> points;  // ions x tau x patterns, in config order
  std::vector<std::string> files;
};

/// Solves one point. Every solution's chi matrix is checked in coefficient
/// space; an instance that fails the check counts as failed.
SweepPoint solve_point(const SweepConfig& config, int ion_count, double tau_us, Pattern pattern);

/// Runs every point on `config.workers` threads and writes the CSV tables
/// when config.output_dir is set. Point failures never throw.
SweepResult sweep(const SweepConfig& config);

std::string power_vs_index_csv(const SweepPoint& point, const std::vector<std::string>& header);
std::string power_vs_n_csv(const SweepResult& result, const std::vector<std::string>& header);
std::string power_vs_tau_csv(const SweepResult& result, const std::vector<std::string>& header);

}  // namespace msp
