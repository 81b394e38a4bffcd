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

// Python bindings for the msparallel pulse compiler.

#include "msp/assignment.hpp"
#include "msp/calibration.hpp"
#include "msp/config.hpp"
#include "msp/errors.hpp"
#include "msp/protocols.hpp"
#include "msp/run.hpp"
#include "msp/spectrum.hpp"
#include "msp/synthesis.hpp"
#include "msp/units.hpp"
#include "msp/verification.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <vector>

namespace py = pybind11;

namespace {

msp::GateSpec make_spec(const std::vector<std::pair<int, int>>& pairs, const std::vector<double>& chi) {
  if (!chi.empty() && chi.size() != pairs.size())
    msp::fail(msp::ErrorKind::kInvalidInput, "chi needs one target per pair");
  msp::GateSpec s;
  for (std::size_t m = 0; m < pairs.size(); ++m) {
    msp::GateTarget g{pairs[m].first, pairs[m].second};
    if (!chi.empty()) g.chi = chi[m];
    s.gates.push_back(g);
  }
  return s;
}

msp::SignPolicy sign_policy(const std::string& name) {
  if (name == "flip_ion") return msp::SignPolicy::kFlipIon;
  if (name == "record") return msp::SignPolicy::kRecord;
  if (name == "strict") return msp::SignPolicy::kStrict;
  msp::fail(msp::ErrorKind::kInvalidInput, "unknown sign policy '" + name + "'");
}

py::tuple pair_tuple(msp::IonPair p) { return py::make_tuple(p.first, p.second); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Parallel Molmer-Sorensen pulse synthesis and time-domain verification";

  static py::exception<msp::Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const msp::Error& e) {
      const py::object type = error;
      py::object inst = type(e.what());
      inst.attr("kind") = std::string(msp::to_string(e.kind()));
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  m.def("mhz_to_angular", &msp::mhz_to_angular);
  m.def("angular_to_mhz", &msp::angular_to_mhz);

  py::class_<msp::ModeSpectrum>(m, "ModeSpectrum")
      .def_readonly("mode_frequencies", &msp::ModeSpectrum::mode_frequencies, "rad/us, ascending")
      .def_readonly("lamb_dicke", &msp::ModeSpectrum::lamb_dicke, "ion x mode")
      .def_readonly("provenance", &msp::ModeSpectrum::provenance)
      .def_property_readonly("ion_count", &msp::ModeSpectrum::ion_count)
      .def_property_readonly("mode_count", &msp::ModeSpectrum::mode_count);

  m.def("load_fixture", &msp::load_fixture, py::arg("ion_count"));
  m.def(
      "compute_modes",
      [](int ions, double axial_mhz, double transverse_mhz, double lamb_dicke) {
        return msp::compute_modes(msp::TrapModel::from_mhz(ions, axial_mhz, transverse_mhz, lamb_dicke));
      },
      py::arg("ion_count"), py::arg("axial_mhz") = 0.25, py::arg("transverse_mhz") = 3.0,
      py::arg("lamb_dicke") = 0.1);

  py::class_<msp::SolverContext>(m, "SolverContext")
      .def(py::init([](const msp::ModeSpectrum& s, double tau, double guard, int order) {
             return msp::SolverContext::build(s, tau, guard, order);
           }),
           py::arg("spectrum"), py::arg("tau_us"), py::arg("guard_mhz") = 0.1,
           py::arg("stabilization_order") = 0)
      .def_readonly("spectrum", &msp::SolverContext::spectrum)
      .def_property_readonly("tau_us", [](const msp::SolverContext& c) { return c.basis.tau; })
      .def_property_readonly("basis_indices", [](const msp::SolverContext& c) { return c.basis.indices; })
      .def_property_readonly("basis_frequencies", [](const msp::SolverContext& c) { return c.basis.frequencies(); })
      .def_property_readonly("null_dimension", [](const msp::SolverContext& c) { return c.null.dimension(); })
      .def_property_readonly("kernels", [](const msp::SolverContext& c) { return c.kernels.per_mode; });

  py::class_<msp::GateSolution>(m, "GateSolution")
      .def_property_readonly("pair", [](const msp::GateSolution& g) { return pair_tuple(g.pair); })
      .def_readonly("target", &msp::GateSolution::target)
      .def_readonly("mode", &msp::GateSolution::mode)
      .def_readonly("eigen_index", &msp::GateSolution::eigen_index)
      .def_readonly("iteration", &msp::GateSolution::iteration)
      .def_readonly("coefficients", &msp::GateSolution::coefficients)
      .def_readonly("achieved_chi", &msp::GateSolution::achieved_chi)
      .def_readonly("achieved_sign", &msp::GateSolution::achieved_sign)
      .def_property_readonly("side_scale", [](const msp::GateSolution& g) { return py::make_tuple(g.side_scale[0], g.side_scale[1]); })
      .def_property_readonly("gbar", &msp::gate_gbar);

  py::class_<msp::PulseSolution>(m, "PulseSolution")
      .def_readonly("protocol", &msp::PulseSolution::protocol)
      .def_readonly("gates", &msp::PulseSolution::gates)
      .def_readonly("ion_count", &msp::PulseSolution::ion_count)
      .def_readonly("slot_signs", &msp::PulseSolution::slot_signs)
      .def_readonly("slot_scale", &msp::PulseSolution::slot_scale)
      .def_readonly("notes", &msp::PulseSolution::notes)
      .def_property_readonly("slot_count", &msp::PulseSolution::slot_count)
      .def("ion_coefficients", &msp::PulseSolution::ion_coefficients, py::arg("slot") = 0)
      .def(
          "chi_matrix",
          [](const msp::PulseSolution& s, const msp::SolverContext& c) {
            return s.chi_matrix(c.kernels, c.spectrum);
          },
          py::arg("context"))
      .def("without_gate", &msp::PulseSolution::without_gate, py::arg("index"))
      .def("with_gate_scaled", &msp::PulseSolution::with_gate_scaled, py::arg("index"), py::arg("factor"))
      .def("ion_amplitude_budget", &msp::ion_amplitude_budget);

  m.def(
      "synthesize",
      [](const msp::SolverContext& c, const std::vector<std::pair<int, int>>& pairs,
         const std::vector<double>& chi, const std::string& protocol, const std::string& policy) {
        const msp::GateSpec spec = make_spec(pairs, chi);
        msp::SynthesisOptions o;
        o.sign_policy = sign_policy(policy);
        switch (msp::parse_protocol(protocol)) {
          case msp::Protocol::kSequencing:
            return msp::sequencing_synthesize(spec, c, o);
          case msp::Protocol::kDisjoint:
            return msp::disjoint_synthesize(spec, c, o);
          case msp::Protocol::kCommon:
            break;
        }
        return msp::synthesize(spec, c, o);
      },
      py::arg("context"), py::arg("pairs"), py::arg("chi") = std::vector<double>{},
      py::arg("protocol") = "common", py::arg("sign_policy") = "flip_ion",
      "Pulses for 0-based ion pairs; chi defaults to pi/2 per gate.");

  m.def(
      "rebalance_power",
      [](const msp::PulseSolution& s, bool pass_through) {
        return msp::rebalance_power(s, {.pass_through = pass_through});
      },
      py::arg("solution"), py::arg("pass_through") = false);

  m.def("gate_level_scaling", &msp::gate_level_scaling, py::arg("solution"), py::arg("measured"));

  py::class_<msp::VerificationCheck>(m, "VerificationCheck")
      .def_readonly("name", &msp::VerificationCheck::name)
      .def_readonly("passed", &msp::VerificationCheck::passed)
      .def_readonly("value", &msp::VerificationCheck::value)
      .def_readonly("threshold", &msp::VerificationCheck::threshold);

  py::class_<msp::VerificationReport>(m, "VerificationReport")
      .def_readonly("chi", &msp::VerificationReport::chi)
      .def_readonly("chi_coefficient", &msp::VerificationReport::chi_coefficient)
      .def_readonly("alpha", &msp::VerificationReport::alpha)
      .def_readonly("gate_gbar", &msp::VerificationReport::gate_gbar)
      .def_readonly("max_alpha_ratio", &msp::VerificationReport::max_alpha_ratio)
      .def_readonly("checks", &msp::VerificationReport::checks)
      .def_property_readonly("passed", &msp::VerificationReport::passed);

  m.def(
      "verify",
      [](const msp::PulseSolution& s, const msp::SolverContext& c) {
        return msp::verify(s, c.spectrum, &c.kernels);
      },
      py::arg("solution"), py::arg("context"), "Time-domain oracle plus the coefficient cross-check.");

  m.def(
      "max_weight_matching",
      [](const Eigen::MatrixXd& w) {
        const msp::Matching r = msp::max_weight_matching(w);
        return py::make_tuple(r.column_of_row, r.weight);
      },
      py::arg("weights"), "Returns (column_of_row, weight).");

  m.def(
      "walsh_signs", [](int n) { return Eigen::MatrixXi(msp::walsh_signs(n).signs); }, py::arg("count"));

  m.def(
      "calibrate",
      [](int qubits, const std::vector<std::tuple<int, int, double>>& edges) {
        msp::CalibrationProblem p;
        p.qubit_count = qubits;
        for (const auto& [a, b, theta] : edges) p.edges.push_back({a, b, theta});
        p.validate();
        const msp::CalibrationResult r = msp::qubit_level_feasibility(p);
        py::dict out;
        out["feasible"] = r.feasible;
        out["knobs"] = r.knobs;
        if (r.violation) {
          out["cycle"] = r.violation->cycle;
          out["defect_ratio"] = r.violation->defect_ratio;
        }
        return out;
      },
      py::arg("qubit_count"), py::arg("edges"), "Edges are 0-based (a, b, theta).");

  m.def(
      "run",
      [](const std::string& config_json) {
        const msp::RunResult r = msp::run(msp::parse_run_config(config_json));
        return py::make_tuple(r.passed(), msp::report_json(r));
      },
      py::arg("config_json"), "Full pipeline from a RunConfig JSON; returns (passed, report JSON).");
}
