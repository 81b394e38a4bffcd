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
#include "msp/spectrum.hpp"
#include "msp/synthesis.hpp"
#include "msp/verification.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace msp {

struct RunResult {
  RunConfig config;
  ModeSpectrum spectrum;
  PulseSolution solution;
  VerificationReport verification;
  std::uint64_t hash = 0;
  std::vector<std::string> files;  // written artifacts, in write order

  bool passed() const { return verification.passed(); }
};

/// Builds the chain and basis, synthesizes with the configured protocol,
/// optionally rebalances, always runs the oracle, and writes artifacts when
/// config.output_dir is set.
RunResult run(const RunConfig& config);

/// Synthesis only, no oracle and no files.
PulseSolution synthesize(const RunConfig& config, const ModeSpectrum& spectrum);

/// Self-contained solution document: chain, basis, per-gate coefficients.
std::string solution_json(const PulseSolution& solution, const ModeSpectrum& spectrum,
                          std::uint64_t hash);

struct StoredSolution {
  PulseSolution solution;
  ModeSpectrum spectrum;
  std::string hash;
};

/// Inverse of solution_json; ConfigError on malformed documents.
StoredSolution parse_solution(std::string_view json_text);

std::string report_json(const RunResult& result);

/// Samples every ion's waveform on [0, tau] for each slot.
struct SampledWaveforms {
  std::vector<double> times;            // us, first 0 and last tau
  std::vector<Eigen::MatrixXd> slots;   // ion x time, rad/us
};

/// Uniform grid with spacing <= 1 / sample_rate ending exactly at tau.
/// SamplingError unless sample_rate exceeds twice the highest basis
/// frequency (in cycles per us).
SampledWaveforms export_waveform(const PulseSolution& solution, double sample_rate);

/// Columns time_us, ion_index, amplitude_rad_per_us, plus slot for
/// multi-slot solutions. `header` lines are emitted as '# ' comments.
std::string waveform_csv(const SampledWaveforms& samples, const std::vector<std::string>& header);

/// Artifact header lines: config hash and chain provenance.
std::vector<std::string> artifact_header(std::uint64_t hash, const ModeSpectrum& spectrum);

/// Shortest round-trip decimal form of a double.
std::string format_number(double value);

}  // namespace msp
