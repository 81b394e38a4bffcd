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

#include "msp/config.hpp"

#include "msp/errors.hpp"
#include "msp/units.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace msp {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& message) { fail(ErrorKind::kConfigError, message); }

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) config_error(where + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key)) {
      std::string list;
      for (const auto& k : ok) list += (list.empty() ? "" : ", ") + k;
      config_error("unknown key '" + key + "' in " + where + " (expected one of: " + list + ")");
    }
}

template <typename T>
T get(const json& j, const char* key, const std::string& where, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    config_error("key '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
}

std::string_view policy_name(SignPolicy p) {
  switch (p) {
    case SignPolicy::kFlipIon: return "flip_ion";
    case SignPolicy::kRecord: return "record";
    case SignPolicy::kStrict: return "strict";
  }
  return "flip_ion";
}

SignPolicy parse_policy(std::string_view name) {
  if (name == "flip_ion") return SignPolicy::kFlipIon;
  if (name == "record") return SignPolicy::kRecord;
  if (name == "strict") return SignPolicy::kStrict;
  config_error("sign_policy must be flip_ion, record or strict, got '" + std::string(name) + "'");
}

GateTarget parse_gate(const json& g, std::size_t index) {
  const std::string where = "gates[" + std::to_string(index) + "]";
  json ions;
  double chi = kHalfPi;
  if (g.is_array()) {
    ions = g;
  } else {
    check_keys(g, where, {"ions", "chi"});
    if (!g.contains("ions")) config_error(where + " needs an 'ions' pair");
    ions = g.at("ions");
    chi = get<double>(g, "chi", where, kHalfPi);
  }
  if (!ions.is_array() || ions.size() != 2 || !ions[0].is_number_integer() ||
      !ions[1].is_number_integer())
    config_error(where + " must name two 1-based ion indices");
  return {ions[0].get<int>() - 1, ions[1].get<int>() - 1, chi};
}

}  // namespace

std::string_view to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::kCommon: return "common";
    case Protocol::kSequencing: return "sequencing";
    case Protocol::kDisjoint: return "disjoint";
  }
  return "common";
}

Protocol parse_protocol(std::string_view name) {
  if (name == "common") return Protocol::kCommon;
  if (name == "sequencing") return Protocol::kSequencing;
  if (name == "disjoint") return Protocol::kDisjoint;
  config_error("protocol must be common, sequencing or disjoint, got '" + std::string(name) + "'");
}

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::kPowerVsIndex: return "power_vs_index";
    case SweepKind::kPowerVsN: return "power_vs_n";
    case SweepKind::kPowerVsTau: return "power_vs_tau";
  }
  return "power_vs_n";
}

std::string_view to_string(Pattern pattern) {
  switch (pattern) {
    case Pattern::kAllPairs: return "all_pairs";
    case Pattern::kHalfDisjoint: return "half_disjoint";
    case Pattern::kTwoDisjoint: return "two_disjoint";
  }
  return "all_pairs";
}

SweepKind parse_sweep_kind(std::string_view name) {
  if (name == "power_vs_index") return SweepKind::kPowerVsIndex;
  if (name == "power_vs_n") return SweepKind::kPowerVsN;
  if (name == "power_vs_tau") return SweepKind::kPowerVsTau;
  config_error("sweep kind must be power_vs_index, power_vs_n or power_vs_tau, got '" +
               std::string(name) + "'");
}

Pattern parse_pattern(std::string_view name) {
  if (name == "all_pairs") return Pattern::kAllPairs;
  if (name == "half_disjoint") return Pattern::kHalfDisjoint;
  if (name == "two_disjoint") return Pattern::kTwoDisjoint;
  config_error("pattern must be all_pairs, half_disjoint or two_disjoint, got '" +
               std::string(name) + "'");
}

void ChainConfig::validate() const {
  if (fixture.has_value() == trap.has_value())
    config_error("chain needs exactly one of 'fixture' or 'trap'");
  if (fixture) {
    const auto sizes = fixture_sizes();
    if (std::find(sizes.begin(), sizes.end(), *fixture) == sizes.end())
      fail(ErrorKind::kUnsupportedFixture,
           "no tabulated fixture for " + std::to_string(*fixture) + " ions (have 7, 9, 11, 13)");
  } else {
    trap->validate();
  }
}

ModeSpectrum ChainConfig::build() const {
  validate();
  return fixture ? load_fixture(*fixture) : compute_modes(*trap);
}

void RunConfig::validate() const {
  chain.validate();
  if (!(tau_us > 0.0) || !std::isfinite(tau_us)) config_error("tau_us must be positive");
  if (!(guard_mhz >= 0.0) || !std::isfinite(guard_mhz)) config_error("guard_mhz must be >= 0");
  if (stabilization_order < 0) config_error("stabilization_order must be >= 0");
  if (sample_rate < 0.0 || !std::isfinite(sample_rate))
    config_error("sample_rate_per_us must be >= 0");
  const int n = chain.fixture ? *chain.fixture : chain.trap->ion_count;
  std::set<std::pair<int, int>> seen;
  for (std::size_t g = 0; g < gates.size(); ++g) {
    const auto& t = gates[g];
    const std::string where = "gates[" + std::to_string(g) + "]";
    if (t.qubit_a < 0 || t.qubit_a >= n || t.qubit_b < 0 || t.qubit_b >= n)
      config_error(where + " names an ion outside 1.." + std::to_string(n));
    if (t.qubit_a == t.qubit_b) config_error(where + " uses the same ion twice");
    if (!std::isfinite(t.chi) || t.chi == 0.0) config_error(where + " needs a nonzero chi");
    if (!seen.insert(std::minmax(t.qubit_a, t.qubit_b)).second)
      config_error(where + " repeats an earlier pair");
  }
}

GateSpec RunConfig::gate_spec() const {
  GateSpec s;
  s.gates = gates;
  return s;
}

void SweepConfig::validate() const {
  if (ions.empty()) config_error("sweep 'ions' must be non-empty");
  if (tau_us.empty()) config_error("sweep 'tau_us' must be non-empty");
  if (patterns.empty()) config_error("sweep 'patterns' must be non-empty");
  for (int n : ions) {
    if (n < 2) config_error("sweep ion counts must be >= 2");
    if (!computed_chain) ChainConfig{n, std::nullopt}.validate();
  }
  for (double t : tau_us)
    if (!(t > 0.0) || !std::isfinite(t)) config_error("sweep tau_us values must be positive");
  if (instances < 1) config_error("instances must be >= 1");
  if (workers < 1) config_error("workers must be >= 1");
  if (!(guard_mhz >= 0.0)) config_error("guard_mhz must be >= 0");
  if (stabilization_order < 0) config_error("stabilization_order must be >= 0");
  if (kind == SweepKind::kPowerVsN && tau_us.size() != 1)
    config_error("power_vs_n takes exactly one tau_us value");
  if (computed_chain) TrapModel::from_mhz(2, axial_mhz, transverse_mhz, lamb_dicke).validate();
}

ModeSpectrum SweepConfig::chain(int ion_count) const {
  if (!computed_chain) return load_fixture(ion_count);
  return compute_modes(TrapModel::from_mhz(ion_count, axial_mhz, transverse_mhz, lamb_dicke));
}

RunConfig parse_run_config(std::string_view json_text) {
  const json j = parse_json(json_text);
  const std::string top = "run config";
  check_keys(j, top,
             {"chain", "gates", "tau_us", "guard_mhz", "stabilization_order", "protocol",
              "rebalance", "sign_policy", "output", "sample_rate_per_us", "detuning_khz"});
  RunConfig c;
  if (!j.contains("chain")) config_error("run config needs a 'chain' entry");
  const json& ch = j.at("chain");
  check_keys(ch, "chain", {"fixture", "trap"});
  if (ch.contains("fixture")) c.chain.fixture = get<int>(ch, "fixture", "chain", 0);
  if (ch.contains("trap")) {
    const json& t = ch.at("trap");
    check_keys(t, "chain.trap", {"ions", "axial_mhz", "transverse_mhz", "lamb_dicke"});
    if (!t.contains("ions")) config_error("chain.trap needs 'ions'");
    c.chain.trap = TrapModel::from_mhz(get<int>(t, "ions", "chain.trap", 0),
                                       get<double>(t, "axial_mhz", "chain.trap", 0.25),
                                       get<double>(t, "transverse_mhz", "chain.trap", 3.0),
                                       get<double>(t, "lamb_dicke", "chain.trap", 0.1));
  }
  if (j.contains("gates")) {
    if (!j.at("gates").is_array()) config_error("'gates' must be a list");
    std::size_t k = 0;
    for (const auto& g : j.at("gates")) c.gates.push_back(parse_gate(g, k++));
  }
  c.tau_us = get<double>(j, "tau_us", top, c.tau_us);
  c.guard_mhz = get<double>(j, "guard_mhz", top, c.guard_mhz);
  c.stabilization_order = get<int>(j, "stabilization_order", top, 0);
  c.protocol = parse_protocol(get<std::string>(j, "protocol", top, "common"));
  c.rebalance = get<bool>(j, "rebalance", top, false);
  c.sign_policy = parse_policy(get<std::string>(j, "sign_policy", top, "flip_ion"));
  c.output_dir = get<std::string>(j, "output", top, "");
  c.sample_rate = get<double>(j, "sample_rate_per_us", top, 0.0);
  c.detuning_khz = get<std::vector<double>>(j, "detuning_khz", top, {});
  c.validate();
  return c;
}

SweepConfig parse_sweep_config(std::string_view json_text) {
  const json j = parse_json(json_text);
  const std::string top = "sweep config";
  check_keys(j, top,
             {"kind", "chain", "axial_mhz", "transverse_mhz", "lamb_dicke", "ions", "tau_us",
              "patterns", "seed", "instances", "guard_mhz", "stabilization_order", "protocol",
              "workers", "output"});
  SweepConfig c;
  if (!j.contains("kind")) config_error("sweep config needs a 'kind'");
  c.kind = parse_sweep_kind(get<std::string>(j, "kind", top, ""));
  const std::string chain = get<std::string>(j, "chain", top, "computed");
  if (chain != "computed" && chain != "fixture")
    config_error("sweep 'chain' must be computed or fixture, got '" + chain + "'");
  c.computed_chain = chain == "computed";
  c.axial_mhz = get<double>(j, "axial_mhz", top, c.axial_mhz);
  c.transverse_mhz = get<double>(j, "transverse_mhz", top, c.transverse_mhz);
  c.lamb_dicke = get<double>(j, "lamb_dicke", top, c.lamb_dicke);
  c.ions = get<std::vector<int>>(j, "ions", top, {});
  if (j.contains("tau_us") && j.at("tau_us").is_number())
    c.tau_us = {j.at("tau_us").get<double>()};
  else
    c.tau_us = get<std::vector<double>>(j, "tau_us", top, {});
  for (const auto& p : get<std::vector<std::string>>(j, "patterns", top, {}))
    c.patterns.push_back(parse_pattern(p));
  c.seed = get<std::uint64_t>(j, "seed", top, c.seed);
  c.instances = get<int>(j, "instances", top, c.instances);
  c.guard_mhz = get<double>(j, "guard_mhz", top, c.guard_mhz);
  c.stabilization_order = get<int>(j, "stabilization_order", top, 0);
  c.protocol = parse_protocol(get<std::string>(j, "protocol", top, "common"));
  c.workers = get<int>(j, "workers", top, 1);
  c.output_dir = get<std::string>(j, "output", top, "");
  c.validate();
  return c;
}

std::string to_json(const RunConfig& c) {
  json j;
  json chain;
  if (c.chain.fixture) chain["fixture"] = *c.chain.fixture;
  if (c.chain.trap)
    chain["trap"] = {{"ions", c.chain.trap->ion_count},
                     {"axial_mhz", angular_to_mhz(c.chain.trap->axial_frequency)},
                     {"transverse_mhz", angular_to_mhz(c.chain.trap->transverse_frequency)},
                     {"lamb_dicke", c.chain.trap->lamb_dicke_scale}};
  j["chain"] = chain;
  j["gates"] = json::array();
  for (const auto& g : c.gates)
    j["gates"].push_back({{"ions", {g.qubit_a + 1, g.qubit_b + 1}}, {"chi", g.chi}});
  j["tau_us"] = c.tau_us;
  j["guard_mhz"] = c.guard_mhz;
  j["stabilization_order"] = c.stabilization_order;
  j["protocol"] = to_string(c.protocol);
  j["rebalance"] = c.rebalance;
  j["sign_policy"] = policy_name(c.sign_policy);
  j["output"] = c.output_dir;
  j["sample_rate_per_us"] = c.sample_rate;
  j["detuning_khz"] = c.detuning_khz;
  return j.dump();
}

std::string to_json(const SweepConfig& c) {
  json j;
  j["kind"] = to_string(c.kind);
  j["chain"] = c.computed_chain ? "computed" : "fixture";
  j["axial_mhz"] = c.axial_mhz;
  j["transverse_mhz"] = c.transverse_mhz;
  j["lamb_dicke"] = c.lamb_dicke;
  j["ions"] = c.ions;
  j["tau_us"] = c.tau_us;
  j["patterns"] = json::array();
  for (auto p : c.patterns) j["patterns"].push_back(to_string(p));
  j["seed"] = c.seed;
  j["instances"] = c.instances;
  j["guard_mhz"] = c.guard_mhz;
  j["stabilization_order"] = c.stabilization_order;
  j["protocol"] = to_string(c.protocol);
  j["workers"] = c.workers;
  j["output"] = c.output_dir;
  return j.dump();
}

std::uint64_t config_hash(const RunConfig& config) {
  json j = json::parse(to_json(config));
  j.erase("output");
  return fnv1a(j.dump());
}

std::uint64_t config_hash(const SweepConfig& config) {
  json j = json::parse(to_json(config));
  j.erase("output");
  j.erase("workers");
  return fnv1a(j.dump());
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex_hash(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace msp
