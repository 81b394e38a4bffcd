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

#include "msp/calibration.hpp"

#include "msp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <string>
#include <utility>

namespace msp {
namespace {

struct Arc {
  int to;
  double log_theta;
};

// Tree path from v up to the root, inclusive.
std::vector<int> path_to_root(const std::vector<int>& parent, int v) {
  std::vector<int> p{v};
  while (parent[v] >= 0) {
    v = parent[v];
    p.push_back(v);
  }
  return p;
}

// Cycle closed by the non-tree edge (u, v): u ... lca ... v.
std::vector<int> tree_cycle(const std::vector<int>& parent, int u, int v) {
  const auto pu = path_to_root(parent, u);
  const auto pv = path_to_root(parent, v);
  const std::set<int> on_u(pu.begin(), pu.end());
  std::size_t iv = 0;
  while (!on_u.count(pv[iv])) ++iv;
  const int lca = pv[iv];
  std::vector<int> cycle;
  for (int x : pu) {
    cycle.push_back(x);
    if (x == lca) break;
  }
  for (std::size_t k = iv; k-- > 0;) cycle.push_back(pv[k]);
  return cycle;
}

}  // namespace

void CalibrationProblem::validate() const {
  if (qubit_count < 0) fail(ErrorKind::kInvalidInput, "qubit count must be >= 0");
  std::set<std::pair<int, int>> seen;
  for (const auto& e : edges) {
    if (!(e.theta > 0.0) || !std::isfinite(e.theta))
      fail(ErrorKind::kInvalidInput, "calibration factors must be positive and finite");
    if (e.a < 0 || e.b < 0 || e.a >= qubit_count || e.b >= qubit_count)
      fail(ErrorKind::kInvalidInput, "calibration edge refers to an unknown qubit");
    if (e.a == e.b) fail(ErrorKind::kInvalidInput, "calibration graph has a self-loop");
    if (!seen.insert(std::minmax(e.a, e.b)).second)
      fail(ErrorKind::kInvalidInput, "calibration graph repeats an edge");
  }
}

CalibrationResult qubit_level_feasibility(const CalibrationProblem& problem, double tolerance) {
  problem.validate();
  const int n = problem.qubit_count;
  std::vector<std::vector<Arc>> adj(static_cast<std::size_t>(n));
  for (const auto& e : problem.edges) {
    adj[e.a].push_back({e.b, std::log(e.theta)});
    adj[e.b].push_back({e.a, std::log(e.theta)});
  }

  // log Omega_v = c[v] + sigma[v] * t, with t the log-knob of the component root.
  std::vector<double> c(static_cast<std::size_t>(n), 0.0);
  std::vector<int> sigma(static_cast<std::size_t>(n), 0), parent(static_cast<std::size_t>(n), -1);
  std::vector<double> log_knob(static_cast<std::size_t>(n), 0.0);
  CalibrationResult result;

  for (int root = 0; root < n; ++root) {
    if (sigma[root] != 0) continue;
    sigma[root] = 1;
    std::vector<int> members{root};
    std::vector<std::pair<int, Arc>> closing;
    std::deque<int> queue{root};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (const Arc& arc : adj[u]) {
        const int v = arc.to;
        if (sigma[v] == 0) {
          sigma[v] = -sigma[u];
          c[v] = arc.log_theta - c[u];
          parent[v] = u;
          members.push_back(v);
          queue.push_back(v);
        } else if (u < v && parent[v] != u && parent[u] != v) {
          closing.push_back({u, arc});
        }
      }
    }
    std::optional<double> t;
    auto report = [&](int u, int v, double defect) {
      if (result.violation) return;
      result.feasible = false;
      result.violation = CycleCertificate{tree_cycle(parent, u, v), std::exp(std::abs(defect))};
    };
    // Even cycles first: they do not involve t.
    for (const auto& [u, arc] : closing) {
      const int v = arc.to;
      if (sigma[u] + sigma[v] != 0) continue;
      const double defect = arc.log_theta - c[u] - c[v];
      if (std::abs(defect) > tolerance) report(u, v, defect);
    }
    for (const auto& [u, arc] : closing) {
      const int v = arc.to;
      if (sigma[u] + sigma[v] == 0) continue;
      const double need = (arc.log_theta - c[u] - c[v]) / (sigma[u] + sigma[v]);
      if (!t) {
        t = need;
      } else if (std::abs(need - *t) * 2.0 > tolerance) {
        report(u, v, 2.0 * (need - *t));
      }
    }
    for (int v : members) log_knob[v] = c[v] + sigma[v] * t.value_or(0.0);
  }
  if (result.feasible) {
    result.knobs.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) result.knobs[v] = std::exp(log_knob[v]);
  }
  return result;
}

std::vector<double> gate_scales(const std::vector<double>& measured) {
  std::vector<double> out;
  for (double theta : measured) {
    if (!(theta > 0.0) || !std::isfinite(theta))
      fail(ErrorKind::kInvalidInput, "per-gate calibration factors must be positive");
    out.push_back(std::sqrt(theta));
  }
  return out;
}

PulseSolution gate_level_scaling(const PulseSolution& solution,
                                 const std::vector<double>& measured) {
  if (measured.size() != solution.gates.size())
    fail(ErrorKind::kInvalidInput, "need one calibration factor per gate");
  const auto scales = gate_scales(measured);
  PulseSolution out = solution;
  for (std::size_t m = 0; m < scales.size(); ++m) {
    GateSolution& g = out.gates[m];
    g.coefficients *= scales[m];
    g.null_coefficients *= scales[m];
    g.achieved_chi *= measured[m];
  }
  return out;
}

}  // namespace msp
