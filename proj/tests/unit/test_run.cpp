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

#include "msp_test.hpp"

#include "msp/protocols.hpp"
#include "msp/run.hpp"
#include "msp/units.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace msp;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("msp_test_run_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig two_gates() {
  return parse_run_config(R"({"chain": {"fixture": 7}, "gates": [[2, 4], [3, 5]], "tau_us": 300})");
}

}  // namespace

TEST_CASE("full pipeline on two gates", "[run]") {
  RunConfig c = two_gates();
  c.output_dir = scratch("pipeline").string();
  c.sample_rate = 8.0;
  c.detuning_khz = {0.0, 0.5};
  const RunResult r = run(c);
  CHECK(r.passed());
  CHECK_THAT(r.verification.chi(1, 3), WithinAbs(std::numbers::pi / 2, 1e-6));
  CHECK_THAT(r.verification.chi(2, 4), WithinAbs(std::numbers::pi / 2, 1e-6));

  const fs::path dir(c.output_dir);
  for (const char* f : {"pulse_2_4.csv", "pulse_3_5.csv", "waveforms.csv", "detuning.csv",
                        "solution.json", "report.json"})
    CHECK(fs::exists(dir / f));
  const std::string hash = hex_hash(config_hash(c));
  const std::string pulse = slurp(dir / "pulse_2_4.csv");
  CHECK_THAT(pulse, ContainsSubstring("# config_hash=" + hash));
  CHECK_THAT(pulse, ContainsSubstring("# provenance=fixture"));
  CHECK_THAT(pulse, ContainsSubstring("basis_index,frequency_mhz,coefficient_rad_per_us"));
  CHECK_THAT(slurp(dir / "detuning.csv"), ContainsSubstring("delta_mhz,mode_index,alpha_abs"));
  CHECK_THAT(slurp(dir / "waveforms.csv"), ContainsSubstring("time_us,ion_index,amplitude_rad_per_us"));

  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["passed"].get<bool>());
  CHECK(report["config_hash"] == hash);
  CHECK(report["gates"].size() == 2);
  CHECK(report["gates"][0]["target"].get<double>() == std::numbers::pi / 2);

  // The stored solution re-verifies on its own.
  const StoredSolution stored = parse_solution(slurp(dir / "solution.json"));
  CHECK(stored.hash == hash);
  REQUIRE(stored.solution.gates.size() == 2);
  for (std::size_t m = 0; m < 2; ++m)
    CHECK(stored.solution.gates[m].coefficients == r.solution.gates[m].coefficients);
  CHECK(verify(stored.solution, stored.spectrum).passed());
}

TEST_CASE("runs are deterministic", "[run]") {
  RunConfig c = two_gates();
  c.output_dir = scratch("det_a").string();
  run(c);
  const std::string a = slurp(fs::path(c.output_dir) / "solution.json");
  const std::string pa = slurp(fs::path(c.output_dir) / "pulse_3_5.csv");
  c.output_dir = scratch("det_b").string();
  run(c);
  CHECK(slurp(fs::path(c.output_dir) / "solution.json") == a);
  CHECK(slurp(fs::path(c.output_dir) / "pulse_3_5.csv") == pa);
}

TEST_CASE("empty gate list succeeds with empty outputs", "[run]") {
  RunConfig c = parse_run_config(R"({"chain": {"fixture": 7}})");
  c.output_dir = scratch("empty").string();
  c.sample_rate = 8.0;
  const RunResult r = run(c);
  CHECK(r.passed());
  CHECK(r.solution.gates.empty());
  const SampledWaveforms w = export_waveform(r.solution, 8.0);
  for (const auto& slot : w.slots) CHECK(slot.isZero(0.0));
}

TEST_CASE("disjoint failures name the band", "[run]") {
  RunConfig c = parse_run_config(
      R"({"chain": {"fixture": 7}, "gates": [[1, 2], [3, 4]], "tau_us": 60, "protocol": "disjoint"})");
  try {
    run(c);
    FAIL("expected InsufficientDOF");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInsufficientDof);
    CHECK_THAT(std::string(e.what()), ContainsSubstring("band"));
  }
}

TEST_CASE("stored solutions reject malformed documents", "[run]") {
  REQUIRE_THROWS_KIND(parse_solution("{"), kConfigError);
  REQUIRE_THROWS_KIND(parse_solution("{}"), kConfigError);
}

TEST_CASE("waveform export of a single basis function", "[run]") {
  PulseSolution s;
  s.ion_count = 2;
  s.basis.tau = 10.0;
  s.basis.indices = {7};
  GateSolution g;
  g.pair = {0, 1};
  g.coefficients = Eigen::VectorXd::Constant(1, 0.8);
  s.gates.push_back(g);
  const SampledWaveforms w = export_waveform(s, 100.0);
  REQUIRE(w.times.size() == 1001);
  CHECK(w.times.front() == 0.0);
  CHECK(w.times.back() == 10.0);
  const double omega = kTwoPi * 7 / 10.0;
  for (std::size_t k = 0; k < w.times.size(); ++k)
    CHECK_THAT(w.slots[0](0, static_cast<Eigen::Index>(k)), WithinAbs(0.8 * std::sin(omega * w.times[k]), 1e-12));
  CHECK(w.slots[0](1, 0) == 0.0);
  CHECK(w.slots[0](1, 1000) == 0.0);
  REQUIRE_THROWS_KIND(export_waveform(s, 1.4), kSamplingError);
  CHECK_NOTHROW(export_waveform(s, 1.41));
}

TEST_CASE("exported samples integrate back to alpha", "[run]") {
  const auto& c = test::context(7, 300.0);
  const PulseSolution s = synthesize(test::pairs({{2, 4}}), c);
  const double rate = 10.0;
  const SampledWaveforms w = export_waveform(s, rate);
  const Eigen::MatrixXd& a = w.slots[0];
  const Eigen::Index ion = 2;
  CHECK(a(ion, 0) == 0.0);
  CHECK(a(ion, a.cols() - 1) == 0.0);
  const Eigen::VectorXd v = s.ion_coefficients().row(ion).transpose();
  const double h = w.times[1] - w.times[0];
  const double wmax = c.basis.frequencies().maxCoeff();
  for (double omega : {c.spectrum.mode_frequencies[0], mhz_to_angular(2.5)}) {
    std::complex<double> trap = 0.0;
    for (std::size_t k = 0; k < w.times.size(); ++k) {
      const double wt = (k == 0 || k + 1 == w.times.size()) ? 0.5 : 1.0;
      trap += wt * h * a(ion, static_cast<Eigen::Index>(k)) * std::exp(std::complex<double>{0.0, -omega * w.times[k]});
    }
    std::complex<double> closed = 0.0;
    for (int l = 0; l < c.basis.size(); ++l) closed += v[l] * std::conj(alpha_row(c.basis.frequency(l), omega, 300.0, 0));
    // Trapezoid error bound tau h^2 / 12 max |f''|.
    const double bound = 300.0 * h * h / 12.0 * std::pow(wmax + omega, 2) * v.cwiseAbs().sum();
    CHECK(std::abs(trap - closed) <= bound);
  }
}

TEST_CASE("sequenced waveforms carry a slot column", "[run]") {
  const auto& c = test::context(7, 300.0);
  const PulseSolution s = sequencing_synthesize(test::pairs({{1, 3}, {2, 4}}), c);
  const SampledWaveforms w = export_waveform(s, 7.0);
  REQUIRE(w.slots.size() == 2);
  const std::string csv = waveform_csv(w, {"config_hash=0"});
  CHECK(csv.rfind("# config_hash=0\nslot,time_us,ion_index,amplitude_rad_per_us\n", 0) == 0);
}

TEST_CASE("number formatting round trips", "[run]") {
  for (double x : {0.1, 1.0 / 3.0, 2.93070, -1e-300, 6.02e23}) CHECK(std::stod(format_number(x)) == x);
  CHECK(format_number(0.5) == "0.5");
}
