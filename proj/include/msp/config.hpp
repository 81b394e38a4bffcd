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

#include "msp/spectrum.hpp"
#include "msp/synthesis.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace msp {

enum class Protocol { kCommon, kSequencing, kDisjoint };

std::string_view to_string(Protocol protocol);
Protocol parse_protocol(std::string_view name);

/// Exactly one of a tabulated fixture or a trap model.
struct ChainConfig {
  std::optional<int> fixture;
  std::optional<TrapModel> trap;

  void validate() const;
  ModeSpectrum build() const;
};

/// One synthesis run. Gates address ions directly (qubit i is ion i).
/// Indices are 0-based here and 1-based in the JSON form.
struct RunConfig {
  ChainConfig chain;
  std::vector<GateTarget> gates;
  double tau_us = 300.0;
  double guard_mhz = 0.1;
  int stabilization_order = 0;
  Protocol protocol = Protocol::kCommon;
  bool rebalance = false;
  SignPolicy sign_policy = SignPolicy::kFlipIon;
  std::string output_dir;       // empty: nothing is written
  double sample_rate = 0.0;     // samples per us for waveforms.csv; 0 skips it
  std::vector<double> detuning_khz;

  void validate() const;
  GateSpec gate_spec() const;
};

enum class SweepKind { kPowerVsIndex, kPowerVsN, kPowerVsTau };
enum class Pattern { kAllPairs, kHalfDisjoint, kTwoDisjoint };

std::string_view to_string(SweepKind kind);
std::string_view to_string(Pattern pattern);
SweepKind parse_sweep_kind(std::string_view name);
Pattern parse_pattern(std::string_view name);

struct SweepConfig {
  SweepKind kind = SweepKind::kPowerVsN;
  bool computed_chain = true;  // false: tabulated fixtures, ions must be 7/9/11/13
  double axial_mhz = 0.25;
  double transverse_mhz = 3.0;
  double lamb_dicke = 0.1;
  std::vector<int> ions;
  std::vector<double> tau_us;
  std::vector<Pattern> patterns;
  std::uint64_t seed = 1;
  int instances = 20;
  double guard_mhz = 0.1;
  int stabilization_order = 0;
  Protocol protocol = Protocol::kCommon;
  int workers = 1;
  std::string output_dir;

  void validate() const;
  ModeSpectrum chain(int ion_count) const;
};

/// Parsing throws ConfigError naming the offending key.
RunConfig parse_run_config(std::string_view json_text);
SweepConfig parse_sweep_config(std::string_view json_text);

/// Canonical JSON (sorted keys, 1-based indices); parse(to_json(c)) == c.
std::string to_json(const RunConfig& config);
std::string to_json(const SweepConfig& config);

/// Hash of the canonical JSON without the output location and worker count,
/// so it identifies the computation rather than where it ran.
std::uint64_t config_hash(const RunConfig& config);
std::uint64_t config_hash(const SweepConfig& config);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex_hash(std::uint64_t hash);

}  // namespace msp
