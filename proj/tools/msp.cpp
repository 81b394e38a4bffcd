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

// msp: command-line front end for synthesis, verification and sweeps.

#include "msp/calibration.hpp"
#include "msp/config.hpp"
#include "msp/errors.hpp"
#include "msp/run.hpp"
#include "msp/spectrum.hpp"
#include "msp/sweep.hpp"
#include "msp/units.hpp"
#include "msp/verification.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

enum Exit { kOk = 0, kTolerance = 1, kConfig = 2, kNumerical = 3 };

int exit_code(msp::ErrorKind kind) {
  switch (kind) {
    case msp::ErrorKind::kNumericalFailure:
    case msp::ErrorKind::kUnstableChain:
    case msp::ErrorKind::kDegenerateSolution:
    case msp::ErrorKind::kSignInfeasible:
    case msp::ErrorKind::kInfeasibleAssignment:
      return kNumerical;
    default:
      return kConfig;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) msp::fail(msp::ErrorKind::kConfigError, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) msp::fail(msp::ErrorKind::kConfigError, "cannot write " + path);
}

json parse_object(const std::string& text, const std::string& what) {
  try {
    json j = json::parse(text);
    if (!j.is_object()) msp::fail(msp::ErrorKind::kConfigError, what + " must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    msp::fail(msp::ErrorKind::kConfigError, what + ": " + e.what());
  }
}

// "a,b" or "a,b,value" -> numbers.
std::vector<double> split_numbers(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      msp::fail(msp::ErrorKind::kConfigError, flag + " expects comma-separated numbers, got '" + s + "'");
    }
  }
  return out;
}

struct ChainFlags {
  std::optional<int> fixture;
  std::optional<int> ions;
  double axial_mhz = 0.25;
  double transverse_mhz = 3.0;
  double lamb_dicke = 0.1;

  void add(CLI::App* app) {
    app->add_option("--fixture", fixture, "Tabulated chain (7, 9, 11 or 13 ions)");
    app->add_option("--ions", ions, "Computed chain with this many ions");
    app->add_option("--axial-mhz", axial_mhz, "Axial trap frequency for computed chains");
    app->add_option("--transverse-mhz", transverse_mhz, "Transverse trap frequency for computed chains");
    app->add_option("--lamb-dicke", lamb_dicke, "Single-ion Lamb-Dicke parameter for computed chains");
  }

  bool given() const { return fixture || ions; }

  json to_json() const {
    if (fixture) return {{"fixture", *fixture}};
    return {{"trap",
             {{"ions", ions.value_or(0)},
              {"axial_mhz", axial_mhz},
              {"transverse_mhz", transverse_mhz},
              {"lamb_dicke", lamb_dicke}}}};
  }
};

void print_summary(const msp::RunResult& r) {
  std::printf("protocol %s, basis L=%d (tau %g us), %zu gates, config %s\n",
              r.solution.protocol.c_str(), r.solution.basis.size(), r.solution.basis.tau,
              r.solution.gates.size(), msp::hex_hash(r.hash).c_str());
  for (const auto& g : r.solution.gates)
    std::printf("  gate (%d,%d) mode %d lambda %d gbar %.6g rad/us chi %.12g\n", g.pair.first + 1,
                g.pair.second + 1, g.mode + 1, g.eigen_index, msp::gate_gbar(g),
                r.verification.chi(g.pair.first, g.pair.second));
  for (const auto& n : r.solution.notes) std::printf("  note: %s\n", n.c_str());
  for (const auto& c : r.verification.checks)
    std::printf("  %-22s %s  %.3e (limit %.1e)\n", c.name.c_str(), c.passed ? "ok  " : "FAIL",
                c.value, c.threshold);
  for (const auto& f : r.files) std::printf("  wrote %s\n", f.c_str());
}

int cmd_modes(const ChainFlags& chain, const std::string& output) {
  if (!chain.given()) msp::fail(msp::ErrorKind::kConfigError, "modes needs --fixture or --ions");
  const msp::ModeSpectrum s =
      chain.fixture ? msp::load_fixture(*chain.fixture)
                    : msp::compute_modes(msp::TrapModel::from_mhz(
                          *chain.ions, chain.axial_mhz, chain.transverse_mhz, chain.lamb_dicke));
  std::string text = "# provenance=" + s.provenance + "\nmode_index,frequency_mhz";
  for (int i = 0; i < s.ion_count(); ++i) text += ",eta_ion" + std::to_string(i + 1);
  text += "\n";
  for (int p = 0; p < s.mode_count(); ++p) {
    text += std::to_string(p + 1) + "," + msp::format_number(msp::angular_to_mhz(s.mode_frequencies[p]));
    for (int i = 0; i < s.ion_count(); ++i) text += "," + msp::format_number(s.lamb_dicke(i, p));
    text += "\n";
  }
  write_output(output, text);
  return kOk;
}

int cmd_verify(const std::string& path, const std::vector<double>& detuning_khz) {
  const msp::StoredSolution s = msp::parse_solution(read_file(path));
  const msp::CouplingKernel kernels = msp::build_kernels(s.solution.basis, s.spectrum);
  msp::VerificationOptions vo;
  for (double khz : detuning_khz) vo.detuning.push_back(msp::mhz_to_angular(khz * 1e-3));
  const msp::VerificationReport v = msp::verify(s.solution, s.spectrum, &kernels, vo);
  std::printf("solution %s (config %s), %zu gates\n", path.c_str(), s.hash.c_str(),
              s.solution.gates.size());
  for (const auto& c : v.checks)
    std::printf("  %-22s %s  %.3e (limit %.1e)\n", c.name.c_str(), c.passed ? "ok  " : "FAIL",
                c.value, c.threshold);
  if (!v.detuning.empty()) {
    std::printf("delta_mhz,mode_index,alpha_abs\n");
    for (const auto& d : v.detuning)
      std::printf("%s,%d,%s\n", msp::format_number(msp::angular_to_mhz(d.delta)).c_str(), d.mode + 1,
                  msp::format_number(d.alpha_abs).c_str());
  }
  return v.passed() ? kOk : kTolerance;
}

int cmd_calibrate(const std::string& path, int qubits, const std::vector<std::string>& edges) {
  msp::CalibrationProblem p;
  if (!path.empty()) {
    const json j = parse_object(read_file(path), path);
    p.qubit_count = j.value("qubits", 0);
    for (const auto& e : j.value("edges", json::array())) {
      if (!e.is_array() || e.size() != 3)
        msp::fail(msp::ErrorKind::kConfigError, "calibration edges are [a, b, theta] triples");
      p.edges.push_back({e[0].get<int>() - 1, e[1].get<int>() - 1, e[2].get<double>()});
    }
  }
  if (qubits > 0) p.qubit_count = qubits;
  for (const auto& e : edges) {
    const auto v = split_numbers(e, "--edge");
    if (v.size() != 3) msp::fail(msp::ErrorKind::kConfigError, "--edge expects a,b,theta");
    p.edges.push_back({static_cast<int>(v[0]) - 1, static_cast<int>(v[1]) - 1, v[2]});
  }
  p.validate();
  const msp::CalibrationResult r = msp::qubit_level_feasibility(p);
  json out;
  out["feasible"] = r.feasible;
  if (r.feasible) out["knobs"] = r.knobs;
  if (r.violation) {
    std::vector<int> cycle;
    for (int q : r.violation->cycle) cycle.push_back(q + 1);
    out["cycle"] = cycle;
    out["defect_ratio"] = r.violation->defect_ratio;
  }
  std::cout << out.dump(1) << "\n";
  return r.feasible ? kOk : kTolerance;
}

int cmd_export(const std::string& path, double rate, const std::string& output) {
  const msp::StoredSolution s = msp::parse_solution(read_file(path));
  const auto samples = msp::export_waveform(s.solution, rate);
  write_output(output, msp::waveform_csv(samples, {"config_hash=" + s.hash,
                                                   "provenance=" + s.spectrum.provenance}));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel Molmer-Sorensen pulse compiler and verifier"};
  app.require_subcommand(1);

  ChainFlags modes_chain;
  std::string modes_out;
  auto* modes = app.add_subcommand("modes", "Print the transverse modes of a chain as CSV");
  modes_chain.add(modes);
  modes->add_option("-o,--output", modes_out, "Output file (default stdout)");

  std::string synth_config;
  ChainFlags synth_chain;
  std::vector<std::string> synth_gates;
  std::optional<double> tau, guard, rate;
  std::optional<int> order;
  std::optional<std::string> protocol, policy, outdir;
  std::optional<std::string> detuning;
  bool rebalance = false;
  auto* synth = app.add_subcommand("synth", "Synthesize, verify and write pulses for one configuration");
  synth->add_option("config", synth_config, "RunConfig JSON file")->check(CLI::ExistingFile);
  synth_chain.add(synth);
  synth->add_option("--gate", synth_gates, "Gate as i,j or i,j,chi (1-based ions); repeatable");
  synth->add_option("--tau-us", tau, "Gate duration in us");
  synth->add_option("--guard-mhz", guard, "Basis guard band in MHz");
  synth->add_option("--order", order, "Stabilization order K");
  synth->add_option("--protocol", protocol, "common, sequencing or disjoint");
  synth->add_option("--sign-policy", policy, "flip_ion, record or strict");
  synth->add_flag("--rebalance", rebalance, "Rebalance star-shaped gate graphs");
  synth->add_option("--output", outdir, "Output directory");
  synth->add_option("--sample-rate", rate, "Write waveforms.csv at this many samples per us");
  synth->add_option("--detuning-khz", detuning, "Comma-separated detunings for the alpha scan");

  std::string verify_path;
  std::string verify_detuning;
  auto* verify = app.add_subcommand("verify", "Re-run the oracle on a stored solution.json");
  verify->add_option("solution", verify_path, "solution.json")->required()->check(CLI::ExistingFile);
  verify->add_option("--detuning-khz", verify_detuning, "Comma-separated detunings for the alpha scan");

  std::string sweep_config;
  std::optional<int> workers, instances;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Run a power sweep and write CSV tables");
  sweep->add_option("config", sweep_config, "SweepConfig JSON file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--workers", workers, "Concurrent sweep points");
  sweep->add_option("--instances", instances, "Random pattern instances per point");
  sweep->add_option("--seed", seed, "Seed for random pattern instances");
  sweep->add_option("--output", sweep_out, "Output directory");

  std::string cal_path;
  int cal_qubits = 0;
  std::vector<std::string> cal_edges;
  auto* calibrate = app.add_subcommand("calibrate", "Check qubit-level calibration feasibility");
  calibrate->add_option("problem", cal_path, "JSON with qubits and [a, b, theta] edges")
      ->check(CLI::ExistingFile);
  calibrate->add_option("--qubits", cal_qubits, "Number of qubits");
  calibrate->add_option("--edge", cal_edges, "Edge as a,b,theta (1-based); repeatable");

  std::string export_path, export_out;
  double export_rate = 0.0;
  auto* exporter = app.add_subcommand("export", "Sample a stored solution's waveforms to CSV");
  exporter->add_option("solution", export_path, "solution.json")->required()->check(CLI::ExistingFile);
  exporter->add_option("--rate", export_rate, "Samples per us")->required();
  exporter->add_option("-o,--output", export_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (modes->parsed()) return cmd_modes(modes_chain, modes_out);

    if (synth->parsed()) {
      json j = synth_config.empty() ? json::object() : parse_object(read_file(synth_config), synth_config);
      if (synth_chain.given()) j["chain"] = synth_chain.to_json();
      if (!synth_gates.empty()) {
        j["gates"] = json::array();
        for (const auto& g : synth_gates) {
          const auto v = split_numbers(g, "--gate");
          if (v.size() < 2 || v.size() > 3)
            msp::fail(msp::ErrorKind::kConfigError, "--gate expects i,j or i,j,chi");
          json e = {{"ions", {static_cast<int>(v[0]), static_cast<int>(v[1])}}};
          if (v.size() == 3) e["chi"] = v[2];
          j["gates"].push_back(e);
        }
      }
      if (tau) j["tau_us"] = *tau;
      if (guard) j["guard_mhz"] = *guard;
      if (order) j["stabilization_order"] = *order;
      if (protocol) j["protocol"] = *protocol;
      if (policy) j["sign_policy"] = *policy;
      if (rebalance) j["rebalance"] = true;
      if (outdir) j["output"] = *outdir;
      if (rate) j["sample_rate_per_us"] = *rate;
      if (detuning) j["detuning_khz"] = split_numbers(*detuning, "--detuning-khz");
      const msp::RunResult r = msp::run(msp::parse_run_config(j.dump()));
      print_summary(r);
      return r.passed() ? kOk : kTolerance;
    }

    if (verify->parsed())
      return cmd_verify(verify_path, verify_detuning.empty()
                                         ? std::vector<double>{}
                                         : split_numbers(verify_detuning, "--detuning-khz"));

    if (sweep->parsed()) {
      json j = parse_object(read_file(sweep_config), sweep_config);
      if (workers) j["workers"] = *workers;
      if (instances) j["instances"] = *instances;
      if (seed) j["seed"] = *seed;
      if (sweep_out) j["output"] = *sweep_out;
      const msp::SweepResult r = msp::sweep(msp::parse_sweep_config(j.dump()));
      int failed = 0;
      for (const auto& p : r.points) {
        std::printf("N=%d tau=%g %s: ", p.ion_count, p.tau_us, std::string(msp::to_string(p.pattern)).c_str());
        if (p.ok())
          std::printf("mean gbar %.6g, max %.6g (%d/%d instances)\n", p.mean_gbar, p.max_gbar,
                      p.instances - p.failed, p.instances);
        else
          std::printf("failed: %s\n", p.reason.c_str());
        failed += p.ok() ? 0 : 1;
      }
      for (const auto& f : r.files) std::printf("wrote %s\n", f.c_str());
      if (failed > 0) std::printf("%d point(s) failed\n", failed);
      return kOk;
    }

    if (calibrate->parsed()) return cmd_calibrate(cal_path, cal_qubits, cal_edges);
    if (exporter->parsed()) return cmd_export(export_path, export_rate, export_out);
  } catch (const msp::Error& e) {
    std::fprintf(stderr, "msp: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    std::fprintf(stderr, "msp: malformed input: %s\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "msp: %s\n", e.what());
    return kNumerical;
  }
  return kOk;
}
