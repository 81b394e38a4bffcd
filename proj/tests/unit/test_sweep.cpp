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

#include "msp/sweep.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace msp;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_data_lines(const std::string& csv) {
  int n = 0;
  std::istringstream in(csv);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    ++n;
  }
  return n;
}

bool disjoint(const GateSpec& s) {
  std::set<int> seen;
  for (const auto& g : s.gates)
    if (!seen.insert(g.qubit_a).second || !seen.insert(g.qubit_b).second) return false;
  return true;
}

}  // namespace

TEST_CASE("pattern instances", "[sweep]") {
  const auto all = pattern_instances(Pattern::kAllPairs, 6, 20, 1);
  REQUIRE(all.size() == 1);
  CHECK(all[0].gates.size() == 15);

  // 7 ions, 3 disjoint pairs: 105 arrangements, so 20 are sampled.
  const auto half = pattern_instances(Pattern::kHalfDisjoint, 7, 20, 1);
  REQUIRE(half.size() == 20);
  std::set<std::vector<std::pair<int, int>>> distinct;
  for (const auto& s : half) {
    CHECK(s.gates.size() == 3);
    CHECK(disjoint(s));
    std::vector<std::pair<int, int>> key;
    for (const auto& g : s.gates) key.emplace_back(g.qubit_a, g.qubit_b);
    distinct.insert(key);
  }
  CHECK(distinct.size() == 20);

  // 4 ions, 2 disjoint pairs: all 3 arrangements are enumerated.
  CHECK(pattern_instances(Pattern::kTwoDisjoint, 4, 20, 1).size() == 3);
  CHECK(pattern_instances(Pattern::kTwoDisjoint, 3, 20, 1).empty());

  const auto again = pattern_instances(Pattern::kHalfDisjoint, 7, 20, 1);
  const auto other = pattern_instances(Pattern::kHalfDisjoint, 7, 20, 2);
  bool same = true, differs = false;
  for (std::size_t k = 0; k < 20; ++k) {
    for (std::size_t g = 0; g < 3; ++g) {
      same = same && again[k].gates[g].qubit_a == half[k].gates[g].qubit_a &&
             again[k].gates[g].qubit_b == half[k].gates[g].qubit_b;
      differs = differs || other[k].gates[g].qubit_a != half[k].gates[g].qubit_a ||
                other[k].gates[g].qubit_b != half[k].gates[g].qubit_b;
    }
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("power versus index on the seven ion fixture", "[sweep]") {
  SweepConfig c;
  c.kind = SweepKind::kPowerVsIndex;
  c.computed_chain = false;
  c.ions = {7};
  c.tau_us = {2000.0};
  c.patterns = {Pattern::kAllPairs};
  c.output_dir = (fs::temp_directory_path() / "msp_test_sweep_index").string();
  fs::remove_all(c.output_dir);
  const SweepResult r = sweep(c);
  REQUIRE(r.points.size() == 1);
  const SweepPoint& p = r.points[0];
  INFO(p.reason);
  REQUIRE(p.ok());
  REQUIRE(p.rows.size() == 21);
  for (int k = 0; k < 21; ++k) CHECK(p.rows[k].gate_rank == k + 1);
  const std::string csv = slurp(fs::path(c.output_dir) / "power_vs_index_n7_tau2000_all_pairs.csv");
  CHECK_THAT(csv, ContainsSubstring("gate_rank,ion_i,ion_j,mode_p,lambda,gbar\n"));
  CHECK_THAT(csv, ContainsSubstring("# config_hash=" + hex_hash(config_hash(c))));
  CHECK(count_data_lines(csv) == 21);
}

TEST_CASE("sweeps are byte-identical across worker counts", "[sweep]") {
  SweepConfig c;
  c.kind = SweepKind::kPowerVsTau;
  c.computed_chain = true;
  c.ions = {5, 6};
  c.tau_us = {300.0, 400.0};
  c.patterns = {Pattern::kAllPairs, Pattern::kHalfDisjoint, Pattern::kTwoDisjoint};
  c.instances = 3;
  c.output_dir = (fs::temp_directory_path() / "msp_test_sweep_a").string();
  fs::remove_all(c.output_dir);
  const SweepResult a = sweep(c);
  c.workers = 3;
  c.output_dir = (fs::temp_directory_path() / "msp_test_sweep_b").string();
  fs::remove_all(c.output_dir);
  const SweepResult b = sweep(c);
  const std::string ta = slurp(fs::path(a.files.at(0)));
  CHECK(ta == slurp(fs::path(b.files.at(0))));
  CHECK_THAT(ta, ContainsSubstring("n_ions,pattern,tau_us,mean_gbar,max_gbar,n_gates,instances,failed,reason\n"));
  CHECK_THAT(ta, ContainsSubstring("# provenance=computed chain"));
  CHECK(count_data_lines(ta) == 12);
  for (const auto& p : a.points) {
    INFO(p.ion_count << " " << p.tau_us << " " << to_string(p.pattern) << " " << p.reason);
    CHECK(p.ok());
  }
}

TEST_CASE("failed points are recorded, not dropped", "[sweep]") {
  SweepConfig c;
  c.kind = SweepKind::kPowerVsN;
  c.ions = {5, 7};
  c.tau_us = {20.0};
  c.patterns = {Pattern::kAllPairs};
  const SweepResult r = sweep(c);
  REQUIRE(r.points.size() == 2);
  for (const auto& p : r.points) {
    CHECK_FALSE(p.ok());
    CHECK_FALSE(p.reason.empty());
  }
  const std::string csv = power_vs_n_csv(r, {});
  CHECK(count_data_lines(csv) == 2);
  CHECK_THAT(csv, ContainsSubstring("5,all_pairs,,,10,1,1,"));
}
