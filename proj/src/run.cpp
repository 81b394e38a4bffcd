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

#include "msp/run.hpp"

#include "msp/errors.hpp"
#include "msp/protocols.hpp"
#include "msp/units.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace msp {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Synthesized {
  SolverContext context;
  PulseSolution solution;
};

Synthesized synthesize_with_context(const RunConfig& config, const ModeSpectrum& spectrum) {
  Synthesized out;
  out.context = SolverContext::build(spectrum, config.tau_us, config.guard_mhz,
                                     config.stabilization_order);
  const GateSpec spec = config.gate_spec();
  SynthesisOptions options;
  options.sign_policy = config.sign_policy;
  switch (config.protocol) {
    case Protocol::kCommon:
      out.solution = synthesize(spec, out.context, options);
      break;
    case Protocol::kSequencing:
      out.solution = sequencing_synthesize(spec, out.context, options);
      break;
    case Protocol::kDisjoint:
      out.solution = disjoint_synthesize(spec, out.context, options);
      break;
  }
  if (config.rebalance) out.solution = rebalance_power(out.solution);
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

void write_file(const fs::path& path, const std::string& text, std::vector<std::string>& files) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kConfigError, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::kConfigError, "failed writing " + path.string());
  files.push_back(path.string());
}

std::string header_text(const std::vector<std::string>& header) {
  std::string s;
  for (const auto& h : header) s += "# " + h + "\n";
  return s;
}

std::string pulse_csv(const GateSolution& g, const BasisSet& basis,
                      const std::vector<std::string>& header) {
  std::string s = header_text(header);
  s += "basis_index,frequency_mhz,coefficient_rad_per_us\n";
  for (int k = 0; k < basis.size(); ++k)
    s += std::to_string(basis.indices[k]) + "," + format_number(basis.indices[k] / basis.tau) +
         "," + format_number(g.coefficients[k]) + "\n";
  return s;
}

std::string detuning_csv(const std::vector<DetuningRow>& rows,
                         const std::vector<std::string>& header) {
  std::string s = header_text(header);
  s += "delta_mhz,mode_index,alpha_abs\n";
  for (const auto& r : rows)
    s += format_number(angular_to_mhz(r.delta)) + "," + std::to_string(r.mode + 1) + "," +
         format_number(r.alpha_abs) + "\n";
  return s;
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorKind::kConfigError, std::string("solution is missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::kConfigError, std::string("solution field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string format_number(double value) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, r.ptr);
}

std::vector<std::string> artifact_header(std::uint64_t hash, const ModeSpectrum& spectrum) {
  return {"config_hash=" + hex_hash(hash), "provenance=" + spectrum.provenance};
}

PulseSolution synthesize(const RunConfig& config, const ModeSpectrum& spectrum) {
  config.validate();
  return synthesize_with_context(config, spectrum).solution;
}

RunResult run(const RunConfig& config) {
  config.validate();
  RunResult r;
  r.config = config;
  r.hash = config_hash(config);
  r.spectrum = config.chain.build();
  Synthesized s = synthesize_with_context(config, r.spectrum);
  r.solution = std::move(s.solution);

  VerificationOptions vo;
  for (double khz : config.detuning_khz) vo.detuning.push_back(mhz_to_angular(khz * 1e-3));
  r.verification = verify(r.solution, r.spectrum, &s.context.kernels, vo);

  if (config.output_dir.empty()) return r;
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kConfigError, "cannot create output directory " + dir.string());
  const auto header = artifact_header(r.hash, r.spectrum);
  for (const auto& g : r.solution.gates)
    write_file(dir / ("pulse_" + std::to_string(g.pair.first + 1) + "_" +
                      std::to_string(g.pair.second + 1) + ".csv"),
               pulse_csv(g, r.solution.basis, header), r.files);
  if (config.sample_rate > 0.0)
    write_file(dir / "waveforms.csv",
               waveform_csv(export_waveform(r.solution, config.sample_rate), header), r.files);
  if (!r.verification.detuning.empty())
    write_file(dir / "detuning.csv", detuning_csv(r.verification.detuning, header), r.files);
  write_file(dir / "solution.json", solution_json(r.solution, r.spectrum, r.hash), r.files);
  r.files.push_back((dir / "report.json").string());
  std::ofstream out(dir / "report.json", std::ios::binary);
  out << report_json(r) << "\n";
  if (!out) fail(ErrorKind::kConfigError, "failed writing " + (dir / "report.json").string());
  return r;
}

std::string solution_json(const PulseSolution& solution, const ModeSpectrum& spectrum,
                          std::uint64_t hash) {
  json j;
  j["config_hash"] = hex_hash(hash);
  j["protocol"] = solution.protocol;
  j["ion_count"] = solution.ion_count;
  j["chain"] = {{"provenance", spectrum.provenance},
                {"mode_frequencies_rad_per_us", vector_json(spectrum.mode_frequencies)},
                {"lamb_dicke", matrix_json(spectrum.lamb_dicke)}};
  j["basis"] = {{"tau_us", solution.basis.tau},
                {"indices", solution.basis.indices},
                {"stabilization_order", solution.basis.stabilization_order}};
  j["slot_scale"] = solution.slot_scale;
  j["slot_signs"] = solution.slot_signs;
  j["notes"] = solution.notes;
  j["gates"] = json::array();
  for (const auto& g : solution.gates)
    j["gates"].push_back({{"ions", {g.pair.first + 1, g.pair.second + 1}},
                          {"target", g.target},
                          {"achieved_chi", g.achieved_chi},
                          {"mode", g.mode + 1},
                          {"lambda", g.eigen_index},
                          {"weight", g.weight},
                          {"normalization", g.normalization},
                          {"side_scale", g.side_scale},
                          {"coefficients", vector_json(g.coefficients)}});
  return j.dump(1);
}

StoredSolution parse_solution(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kConfigError, std::string("malformed solution JSON: ") + e.what());
  }
  StoredSolution s;
  s.hash = field<std::string>(j, "config_hash");
  PulseSolution& p = s.solution;
  p.protocol = field<std::string>(j, "protocol");
  p.ion_count = field<int>(j, "ion_count");
  const json& chain = j.at("chain");
  s.spectrum.provenance = field<std::string>(chain, "provenance");
  const auto freqs = field<std::vector<double>>(chain, "mode_frequencies_rad_per_us");
  s.spectrum.mode_frequencies = Eigen::Map<const Eigen::VectorXd>(freqs.data(), freqs.size());
  const auto eta = field<std::vector<std::vector<double>>>(chain, "lamb_dicke");
  s.spectrum.lamb_dicke.resize(static_cast<Eigen::Index>(eta.size()), s.spectrum.mode_count());
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (eta[i].size() != freqs.size())
      fail(ErrorKind::kConfigError, "solution Lamb-Dicke rows do not match the mode count");
    for (std::size_t q = 0; q < eta[i].size(); ++q)
      s.spectrum.lamb_dicke(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q)) = eta[i][q];
  }
  s.spectrum.validate();
  const json& basis = j.at("basis");
  p.basis.tau = field<double>(basis, "tau_us");
  p.basis.indices = field<std::vector<int>>(basis, "indices");
  p.basis.stabilization_order = field<int>(basis, "stabilization_order");
  p.basis.validate();
  p.slot_scale = field<double>(j, "slot_scale");
  p.slot_signs = field<std::vector<std::vector<int>>>(j, "slot_signs");
  p.notes = field<std::vector<std::string>>(j, "notes");
  for (const auto& g : j.at("gates")) {
    GateSolution gs;
    const auto ions = field<std::vector<int>>(g, "ions");
    if (ions.size() != 2) fail(ErrorKind::kConfigError, "solution gate needs two ions");
    gs.pair = IonPair::canonical(ions[0] - 1, ions[1] - 1);
    if (gs.pair.first < 0 || gs.pair.second >= p.ion_count)
      fail(ErrorKind::kConfigError, "solution gate names an ion out of range");
    gs.target = field<double>(g, "target");
    gs.achieved_chi = field<double>(g, "achieved_chi");
    gs.mode = field<int>(g, "mode") - 1;
    gs.eigen_index = field<int>(g, "lambda");
    gs.weight = field<double>(g, "weight");
    gs.normalization = field<double>(g, "normalization");
    gs.side_scale = field<std::array<double, 2>>(g, "side_scale");
    const auto c = field<std::vector<double>>(g, "coefficients");
    if (static_cast<int>(c.size()) != p.basis.size())
      fail(ErrorKind::kConfigError, "solution coefficients do not match the basis size");
    gs.coefficients = Eigen::Map<const Eigen::VectorXd>(c.data(), c.size());
    p.gates.push_back(std::move(gs));
  }
  if (p.ion_count != s.spectrum.ion_count())
    fail(ErrorKind::kConfigError, "solution ion count does not match its chain");
  if (!p.slot_signs.empty() && p.slot_signs.size() != p.gates.size())
    fail(ErrorKind::kConfigError, "solution slot signs do not match the gates");
  return s;
}

std::string report_json(const RunResult& r) {
  json j;
  j["config_hash"] = hex_hash(r.hash);
  j["provenance"] = r.spectrum.provenance;
  j["config"] = json::parse(to_json(r.config));
  j["protocol"] = r.solution.protocol;
  j["passed"] = r.passed();
  j["basis"] = {{"tau_us", r.solution.basis.tau},
                {"size", r.solution.basis.size()},
                {"first_index", r.solution.basis.indices.empty() ? 0 : r.solution.basis.indices.front()},
                {"last_index", r.solution.basis.indices.empty() ? 0 : r.solution.basis.indices.back()},
                {"stabilization_order", r.solution.basis.stabilization_order}};
  j["gates"] = json::array();
  for (std::size_t m = 0; m < r.solution.gates.size(); ++m) {
    const auto& g = r.solution.gates[m];
    j["gates"].push_back({{"ions", {g.pair.first + 1, g.pair.second + 1}},
                          {"iteration", g.iteration + 1},
                          {"mode", g.mode + 1},
                          {"lambda", g.eigen_index},
                          {"weight", g.weight},
                          {"gbar", gate_gbar(g)},
                          {"target", g.target},
                          {"achieved_chi", g.achieved_chi},
                          {"normalization", g.normalization},
                          {"side_scale", g.side_scale},
                          {"projected_directions", g.projected_directions},
                          {"skipped_directions", g.skipped_directions}});
  }
  const VerificationReport& v = r.verification;
  json checks = json::array();
  for (const auto& c : v.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}});
  j["verification"] = {{"checks", checks},
                       {"max_alpha_ratio", v.max_alpha_ratio},
                       {"alpha_error", v.alpha_error},
                       {"chi_error", v.chi_error},
                       {"chi", matrix_json(v.chi)},
                       {"chi_coefficient", matrix_json(v.chi_coefficient)},
                       {"ion_gbar", matrix_json(v.ion_gbar)},
                       {"gate_gbar", vector_json(v.gate_gbar)}};
  j["notes"] = r.solution.notes;
  j["files"] = r.files;
  return j.dump(1);
}

SampledWaveforms export_waveform(const PulseSolution& solution, double sample_rate) {
  const BasisSet& basis = solution.basis;
  if (!(basis.tau > 0.0)) fail(ErrorKind::kInvalidInput, "solution has no basis");
  const double fmax = basis.indices.empty() ? 0.0 : basis.indices.back() / basis.tau;
  if (!(sample_rate > 2.0 * fmax) || !std::isfinite(sample_rate))
    fail(ErrorKind::kSamplingError, "sample rate " + format_number(sample_rate) +
                                        "/us is at or below the Nyquist rate " +
                                        format_number(2.0 * fmax) + "/us");
  const auto intervals = static_cast<long>(std::ceil(basis.tau * sample_rate - 1e-9));
  SampledWaveforms out;
  out.times.resize(static_cast<std::size_t>(intervals + 1));
  for (long k = 0; k <= intervals; ++k)
    out.times[k] = basis.tau * static_cast<double>(k) / static_cast<double>(intervals);
  // sin(2 pi l k / M) with the phase reduced exactly in integers, so the end
  // points are exact zeros.
  std::vector<double> table(static_cast<std::size_t>(intervals));
  for (long j = 0; j < intervals; ++j)
    table[j] = std::sin(kTwoPi * static_cast<double>(j) / static_cast<double>(intervals));
  for (int slot = 0; slot < solution.slot_count(); ++slot) {
    const Eigen::MatrixXd c = solution.ion_coefficients(slot);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(c.rows(), intervals + 1);
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      if (c.row(i).isZero(0.0)) continue;
      for (long k = 0; k <= intervals; ++k) {
        double sum = 0.0;
        for (int b = 0; b < basis.size(); ++b) {
          const long phase = (static_cast<long>(basis.indices[b]) * k) % intervals;
          sum += c(i, b) * table[phase];
        }
        a(i, k) = sum;
      }
    }
    out.slots.push_back(std::move(a));
  }
  return out;
}

std::string waveform_csv(const SampledWaveforms& samples, const std::vector<std::string>& header) {
  const bool multi = samples.slots.size() > 1;
  std::string s = header_text(header);
  s += multi ? "slot,time_us,ion_index,amplitude_rad_per_us\n"
             : "time_us,ion_index,amplitude_rad_per_us\n";
  for (std::size_t slot = 0; slot < samples.slots.size(); ++slot) {
    const Eigen::MatrixXd& a = samples.slots[slot];
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (std::size_t k = 0; k < samples.times.size(); ++k) {
        if (multi) s += std::to_string(slot + 1) + ",";
        s += format_number(samples.times[k]) + "," + std::to_string(i + 1) + "," +
             format_number(a(i, static_cast<Eigen::Index>(k))) + "\n";
      }
  }
  return s;
}

}  // namespace msp
